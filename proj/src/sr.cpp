#include "stsr/sr.hpp"

#include <exception>

#include "stsr/error.hpp"
#include "stsr/png_io.hpp"
#include "stsr/resample.hpp"

namespace stsr {

Frame super_resolve_frame(const Frame &lr, const SrMethod &method, int scale,
                          const std::string &name) {
    if (scale != 4)
        throw std::invalid_argument("super_resolve: only scale 4 is supported");

    if (method.kind == SrMethod::Kind::bicubic)
        return bicubic_resize(lr, lr.height * scale, lr.width * scale);

    const auto path = method.dir / name;
    if (name.empty() || !std::filesystem::exists(path))
        throw data_error("super_resolve: missing precomputed HR frame " + path.string());
    Frame hr = read_png(path);
    if (hr.height != lr.height * scale || hr.width != lr.width * scale)
        throw data_error("super_resolve: precomputed frame " + path.string() +
                         " is not 4x the LR dims");
    return hr;
}

std::vector<Frame> super_resolve(const std::vector<Frame> &frames,
                                 const SrMethod &method, int scale,
                                 const std::vector<std::string> &names) {
    if (method.kind == SrMethod::Kind::precomputed && names.size() != frames.size())
        throw std::invalid_argument("super_resolve: precomputed variant needs one name per frame");

    const int n = static_cast<int>(frames.size());
    std::vector<Frame> out(frames.size());
    std::exception_ptr err;
    // exceptions must not escape the parallel region
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; i++) {
        try {
            out[i] = super_resolve_frame(frames[i], method, scale,
                                         names.empty() ? std::string() : names[i]);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err)
        std::rethrow_exception(err);
    return out;
}

} // namespace stsr
