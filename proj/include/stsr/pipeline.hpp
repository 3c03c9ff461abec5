#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stsr/conv.hpp"
#include "stsr/flow.hpp"
#include "stsr/metrics.hpp"
#include "stsr/raster.hpp"
#include "stsr/sr.hpp"

namespace stsr {

// Ordered even-indexed input frames of one sequence. Frames are named
// <%08d>.png; even indices are inputs, odd indices are synthesized.
struct SequenceManifest {
    std::filesystem::path dir;
    std::vector<int> frame_indices;              // 0, 2, 4, ...
    std::vector<std::filesystem::path> paths;    // one per even frame
    int height = 0, width = 0;                   // LR dims
};

// Scan a directory for contiguous even-indexed <%08d>.png frames starting
// at 0. Odd-indexed files are ignored. Throws data_error on gaps or an
// empty directory.
SequenceManifest scan_sequence(const std::filesystem::path &dir);

struct PipelineConfig {
    int scale = 4;                      // fixed
    std::vector<double> t_values = {3.0}; // interpolation times in (2,4)
    FlowParams flow;
    SrMethod sr;
    std::filesystem::path out_dir;
    std::filesystem::path flow_dir;     // optional: load <i>_<j>.flo
    std::optional<WeightBundle> refine_weights;
    std::optional<WeightBundle> mask_weights;
    std::optional<WeightBundle> flow_refine_weights;
    bool emit_lr = false;               // also write LR synthesized frames
    bool linear_motion = false;         // zero the acceleration term
    int workers = 0;                    // 0 = all cores
};

// End-to-end run: super-resolve even frames, synthesize the odd ones by
// quadratic interpolation + flow/mask reuse, write <%08d>.png outputs.
// The first and last gaps reuse the nearest complete 4-frame window's
// reversed flows and mask. Returns the number of frames written.
int run_pipeline(const SequenceManifest &manifest, const PipelineConfig &config);

// Per-frame PSNR/SSIM between matching <%08d>.png sets, aggregated over
// even frames, odd frames and overall.
MetricReport evaluate_dirs(const std::filesystem::path &pred_dir,
                           const std::filesystem::path &gt_dir);

struct BenchReport {
    int runs = 0;
    double lr_flow_s = 0.0;      // median: estimate_flow at LR + upsample to HR
    double hr_flow_s = 0.0;      // median: estimate_flow at HR
    double ratio = 0.0;          // hr_flow_s / lr_flow_s
};

// Time LR-flow-plus-upsample against direct HR flow on one frame pair,
// median over `runs` (>= 5) repetitions, identical iteration budget per
// pyramid level on both sides. HR dims must be an integer multiple of the
// LR dims (4 in normal use; 1 is allowed for degenerate testing).
BenchReport bench_flow(const Frame &lr_a, const Frame &lr_b,
                       const Frame &hr_a, const Frame &hr_b,
                       const FlowParams &params, int runs = 5);

// Bicubic-downscale every PNG in `in_dir` by `scale` into `out_dir`
// (same file names). Frame dims must be divisible by the scale.
int degrade_dir(const std::filesystem::path &in_dir,
                const std::filesystem::path &out_dir, int scale);

// Deterministic band-limited noise frame, used by `stsr bench` when no
// input frames are supplied and by the test generators.
Frame synthetic_noise_frame(int height, int width, int channels, unsigned seed);

// Cap the OpenMP thread count (0 leaves the default). Results are
// bit-identical for every worker count.
void set_worker_count(int workers);

} // namespace stsr
