#include "stsr/hr_synthesis.hpp"

#include "stsr/qfi.hpp"
#include "stsr/resample.hpp"
#include "stsr/warp.hpp"

namespace stsr {

FlowField upsample_flow_to_hr(const FlowField &f_lr) {
    if (f_lr.channels != 2)
        throw std::invalid_argument("upsample_flow_to_hr: flow must have 2 channels");
    FlowField hr = bilinear_upsample(f_lr, 4);
    for (float &v : hr.data)
        v *= 4.0f;
    return hr;
}

Mask upsample_mask_to_hr(const Mask &m_lr) {
    if (m_lr.channels != 1)
        throw std::invalid_argument("upsample_mask_to_hr: mask must have 1 channel");
    Mask hr = bilinear_upsample(m_lr, 4);
    for (float &v : hr.data)
        v = clamp01(v);
    return hr;
}

Frame synthesize_coarse_hr(const Frame &I2_hr, const Frame &I4_hr,
                           const FlowField &f_t2_hr, const FlowField &f_t4_hr,
                           const Mask &m_hr, double t) {
    require_same_shape(I2_hr, I4_hr, "synthesize_coarse_hr");
    require_same_size(I2_hr, f_t2_hr, "synthesize_coarse_hr");
    require_same_size(I2_hr, f_t4_hr, "synthesize_coarse_hr");
    const Frame warped2 = backward_warp(I2_hr, f_t2_hr);
    const Frame warped4 = backward_warp(I4_hr, f_t4_hr);
    return blend_warped(warped2, warped4, m_hr, t);
}

Frame refine_hr_frame(const Frame &coarse, const Frame &I2_hr, const Frame &I4_hr,
                      const FlowField &f_t2_hr, const FlowField &f_t4_hr,
                      const Mask &m_hr, const Frame &warped2, const Frame &warped4,
                      const WeightBundle *weights) {
    if (!weights)
        return coarse;

    require_same_shape(coarse, I2_hr, "refine_hr_frame");
    require_same_shape(coarse, I4_hr, "refine_hr_frame");
    require_same_shape(coarse, warped2, "refine_hr_frame");
    require_same_shape(coarse, warped4, "refine_hr_frame");
    require_same_size(coarse, f_t2_hr, "refine_hr_frame");
    require_same_size(coarse, f_t4_hr, "refine_hr_frame");
    require_same_size(coarse, m_hr, "refine_hr_frame");

    const int h = coarse.height, w = coarse.width, fc = coarse.channels;
    const int stack_ch = 5 * fc + 4 + 1; // coarse, I2, I4, warped2, warped4 + flows + mask
    if (weights->input_channels() != stack_ch || weights->output_channels() != fc)
        throw std::invalid_argument(
            "refine_hr_frame: bundle must map " + std::to_string(stack_ch) +
            " input channels to " + std::to_string(fc) + ", got " +
            std::to_string(weights->input_channels()) + "->" +
            std::to_string(weights->output_channels()));

    Raster stack(h, w, stack_ch);
    for (int y = 0; y < h; y++) {
        for (int x = 0; x < w; x++) {
            int c = 0;
            for (int k = 0; k < fc; k++) stack.at(y, x, c++) = coarse.at(y, x, k);
            for (int k = 0; k < fc; k++) stack.at(y, x, c++) = I2_hr.at(y, x, k);
            for (int k = 0; k < fc; k++) stack.at(y, x, c++) = I4_hr.at(y, x, k);
            stack.at(y, x, c++) = f_t2_hr.at(y, x, 0);
            stack.at(y, x, c++) = f_t2_hr.at(y, x, 1);
            stack.at(y, x, c++) = f_t4_hr.at(y, x, 0);
            stack.at(y, x, c++) = f_t4_hr.at(y, x, 1);
            stack.at(y, x, c++) = m_hr.at(y, x, 0);
            for (int k = 0; k < fc; k++) stack.at(y, x, c++) = warped2.at(y, x, k);
            for (int k = 0; k < fc; k++) stack.at(y, x, c++) = warped4.at(y, x, k);
        }
    }
    const Raster residual = conv_forward(*weights, stack);

    Frame out = coarse;
    for (int y = 0; y < h; y++)
        for (int x = 0; x < w; x++)
            for (int k = 0; k < fc; k++)
                out.at(y, x, k) = clamp01(coarse.at(y, x, k) + residual.at(y, x, k));
    return out;
}

} // namespace stsr
