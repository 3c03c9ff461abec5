#include "stsr/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stsr/decompose.hpp"
#include "stsr/error.hpp"
#include "stsr/flo_io.hpp"
#include "stsr/hr_synthesis.hpp"
#include "stsr/png_io.hpp"
#include "stsr/qfi.hpp"
#include "stsr/resample.hpp"
#include "stsr/warp.hpp"

namespace stsr {

namespace {

// "00000012.png" -> 12
std::optional<int> parse_frame_index(const std::string &name) {
    if (name.size() != 12 || name.substr(8) != ".png")
        return std::nullopt;
    int v = 0;
    for (int i = 0; i < 8; i++) {
        if (name[i] < '0' || name[i] > '9')
            return std::nullopt;
        v = v * 10 + (name[i] - '0');
    }
    return v;
}

std::string frame_file_name(double time) {
    char buf[32];
    const long ti = std::lround(time);
    if (std::fabs(time - static_cast<double>(ti)) < 1e-9) {
        std::snprintf(buf, sizeof(buf), "%08ld.png", ti);
    } else {
        long fl = static_cast<long>(std::floor(time));
        int cents = static_cast<int>(std::lround((time - fl) * 100.0));
        if (cents == 100) { // times like x.9999 round up to the next frame
            fl += 1;
            cents = 0;
        }
        std::snprintf(buf, sizeof(buf), "%08ldp%02d.png", fl, cents);
    }
    return buf;
}

template <typename Fn>
void parallel_tasks(int n, Fn &&fn) {
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; i++) {
        try {
            fn(i);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err)
        std::rethrow_exception(err);
}

} // namespace

void set_worker_count(int workers) {
#ifdef _OPENMP
    if (workers > 0)
        omp_set_num_threads(workers);
#else
    (void)workers;
#endif
}

SequenceManifest scan_sequence(const std::filesystem::path &dir) {
    if (!std::filesystem::is_directory(dir))
        throw data_error("scan_sequence: not a directory: " + dir.string());

    std::vector<int> found;
    for (const auto &entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file())
            continue;
        if (auto idx = parse_frame_index(entry.path().filename().string()))
            found.push_back(*idx);
    }
    std::sort(found.begin(), found.end());
    if (found.empty())
        throw data_error("scan_sequence: no <%08d>.png frames in " + dir.string());

    SequenceManifest m;
    m.dir = dir;
    const int max_index = found.back();
    std::vector<char> present(max_index + 1, 0);
    for (int i : found)
        present[i] = 1;
    for (int i = 0; i <= max_index; i += 2) {
        if (!present[i])
            throw data_error("scan_sequence: missing even frame " +
                             frame_file_name(i) + " in " + dir.string());
        m.frame_indices.push_back(i);
        m.paths.push_back(dir / frame_file_name(i));
    }

    const Frame first = read_png(m.paths.front());
    m.height = first.height;
    m.width = first.width;
    return m;
}

int run_pipeline(const SequenceManifest &manifest, const PipelineConfig &config) {
    if (config.scale != 4)
        throw usage_error("run: only spatial scale 4 is supported");
    if (config.t_values.empty())
        throw usage_error("run: at least one t value required");
    for (double t : config.t_values)
        if (!(t > 2.0 && t < 4.0))
            throw usage_error("run: t values must lie strictly inside (2,4)");

    const int n = static_cast<int>(manifest.paths.size());
    if (n < 4)
        throw data_error("run: need at least 4 even input frames, got " +
                         std::to_string(n));

    set_worker_count(config.workers);
    std::filesystem::create_directories(config.out_dir);
    if (config.emit_lr)
        std::filesystem::create_directories(config.out_dir / "lr");

    // decode all LR frames up front
    std::vector<Frame> lr(n);
    parallel_tasks(n, [&](int i) { lr[i] = read_png(manifest.paths[i]); });
    for (int i = 0; i < n; i++) {
        if (lr[i].height != manifest.height || lr[i].width != manifest.width ||
            lr[i].channels != lr[0].channels)
            throw data_error("run: frame " + manifest.paths[i].string() +
                             " does not match the sequence layout");
    }

    const auto sr_name = [&](int i) {
        return manifest.paths[i].filename().string();
    };

    // even frames: super-resolve and write
    parallel_tasks(n, [&](int i) {
        const Frame hr = super_resolve_frame(lr[i], config.sr, config.scale, sr_name(i));
        write_png(hr, config.out_dir / frame_file_name(manifest.frame_indices[i]));
    });

    // pairwise flows between adjacent even frames, both directions
    std::vector<FlowField> fwd(n - 1), bwd(n - 1);
    if (!config.flow_dir.empty()) {
        parallel_tasks(n - 1, [&](int j) {
            const int a = manifest.frame_indices[j];
            const int b = manifest.frame_indices[j + 1];
            const auto name = [&](int from, int to) {
                return std::to_string(from) + "_" + std::to_string(to) + ".flo";
            };
            fwd[j] = read_flo(config.flow_dir / name(a, b));
            bwd[j] = read_flo(config.flow_dir / name(b, a));
            if (fwd[j].height != manifest.height || fwd[j].width != manifest.width ||
                bwd[j].height != manifest.height || bwd[j].width != manifest.width)
                throw data_error("run: flow files for pair " + std::to_string(a) + "," +
                                 std::to_string(b) + " do not match the LR dims");
        });
    } else {
        parallel_tasks(2 * (n - 1), [&](int k) {
            const int j = k / 2;
            if (k % 2 == 0)
                fwd[j] = estimate_flow(lr[j], lr[j + 1], config.flow);
            else
                bwd[j] = estimate_flow(lr[j + 1], lr[j], config.flow);
        });
    }

    const WeightBundle *refine_w = config.refine_weights ? &*config.refine_weights : nullptr;
    const WeightBundle *mask_w = config.mask_weights ? &*config.mask_weights : nullptr;
    const WeightBundle *flow_w = config.flow_refine_weights ? &*config.flow_refine_weights : nullptr;

    // gaps between consecutive even frames; the first and last gap reuse
    // the nearest complete 4-frame window's flows
    parallel_tasks(n - 1, [&](int j) {
        const int w = std::clamp(j, 1, n - 3);
        const FlowField &f20 = bwd[w - 1]; // E_w -> E_{w-1}
        const FlowField &f24 = fwd[w];     // E_w -> E_{w+1}
        const FlowField &f42 = bwd[w];     // E_{w+1} -> E_w
        const FlowField &f46 = fwd[w + 1]; // E_{w+1} -> E_{w+2}

        for (double t : config.t_values) {
            const float tau2 = static_cast<float>((t - 2.0) / 2.0);
            const float tau4 = static_cast<float>((4.0 - t) / 2.0);
            const FlowField f_2t = config.linear_motion
                                       ? linear_intermediate_flow(f20, f24, tau2)
                                       : quadratic_intermediate_flow(f20, f24, tau2);
            const FlowField f_4t = config.linear_motion
                                       ? linear_intermediate_flow(f46, f42, tau4)
                                       : quadratic_intermediate_flow(f46, f42, tau4);

            FlowField f_t2 = reverse_flow(f_2t);
            FlowField f_t4 = reverse_flow(f_4t);
            std::tie(f_t2, f_t4) = refine_flow(f_t2, f_t4, lr[j], lr[j + 1], flow_w);
            const Mask m = estimate_blend_mask(f_t2, f_2t, f_t4, f_4t, mask_w,
                                               &lr[j], &lr[j + 1]);

            const double time = manifest.frame_indices[j] + (t - 2.0);
            if (config.emit_lr) {
                const Frame lr_t = synthesize_lr_frame(lr[j], lr[j + 1], f_t2, f_t4, m, t);
                write_png(lr_t, config.out_dir / "lr" / frame_file_name(time));
            }

            const Frame i2_hr = super_resolve_frame(lr[j], config.sr, config.scale, sr_name(j));
            const Frame i4_hr = super_resolve_frame(lr[j + 1], config.sr, config.scale, sr_name(j + 1));
            const FlowField f_t2_hr = upsample_flow_to_hr(f_t2);
            const FlowField f_t4_hr = upsample_flow_to_hr(f_t4);
            const Mask m_hr = upsample_mask_to_hr(m);
            const Frame warped2 = backward_warp(i2_hr, f_t2_hr);
            const Frame warped4 = backward_warp(i4_hr, f_t4_hr);
            const Frame coarse = blend_warped(warped2, warped4, m_hr, t);
            const Frame final_hr = refine_hr_frame(coarse, i2_hr, i4_hr, f_t2_hr,
                                                   f_t4_hr, m_hr, warped2, warped4,
                                                   refine_w);
            write_png(final_hr, config.out_dir / frame_file_name(time));
        }
    });

    return n + (n - 1) * static_cast<int>(config.t_values.size());
}

MetricReport evaluate_dirs(const std::filesystem::path &pred_dir,
                           const std::filesystem::path &gt_dir) {
    const auto list_frames = [](const std::filesystem::path &dir) {
        if (!std::filesystem::is_directory(dir))
            throw data_error("eval: not a directory: " + dir.string());
        std::vector<int> idx;
        for (const auto &entry : std::filesystem::directory_iterator(dir))
            if (entry.is_regular_file())
                if (auto i = parse_frame_index(entry.path().filename().string()))
                    idx.push_back(*i);
        std::sort(idx.begin(), idx.end());
        return idx;
    };

    const std::vector<int> pred_idx = list_frames(pred_dir);
    const std::vector<int> gt_idx = list_frames(gt_dir);
    for (int i : pred_idx)
        if (!std::binary_search(gt_idx.begin(), gt_idx.end(), i))
            throw data_error("eval: frame " + std::to_string(i) +
                             " has no ground-truth counterpart");
    for (int i : gt_idx)
        if (!std::binary_search(pred_idx.begin(), pred_idx.end(), i))
            throw data_error("eval: frame " + std::to_string(i) +
                             " has no predicted counterpart");
    if (pred_idx.empty())
        throw data_error("eval: no frames found in " + pred_dir.string());

    MetricReport report;
    report.frames.resize(pred_idx.size());
    parallel_tasks(static_cast<int>(pred_idx.size()), [&](int k) {
        const int i = pred_idx[k];
        const Frame p = read_png(pred_dir / frame_file_name(i));
        const Frame g = read_png(gt_dir / frame_file_name(i));
        if (!p.same_shape(g))
            throw data_error("eval: frame " + std::to_string(i) +
                             " differs in shape between pred and gt");
        if (p.height < 11 || p.width < 11)
            throw data_error("eval: frame " + std::to_string(i) +
                             " is smaller than the 11x11 SSIM window");
        report.frames[k] = {i, i % 2 != 0, psnr(p, g), ssim(p, g)};
    });
    report.compute_aggregates();
    return report;
}

BenchReport bench_flow(const Frame &lr_a, const Frame &lr_b,
                       const Frame &hr_a, const Frame &hr_b,
                       const FlowParams &params, int runs) {
    require_same_shape(lr_a, lr_b, "bench_flow");
    require_same_shape(hr_a, hr_b, "bench_flow");
    if (runs < 1)
        throw usage_error("bench: runs must be >= 1");
    if (hr_a.width % lr_a.width != 0 || hr_a.height % lr_a.height != 0)
        throw std::invalid_argument("bench_flow: HR dims must be a multiple of LR dims");
    const int factor = hr_a.width / lr_a.width;
    if (factor < 1 || hr_a.height != lr_a.height * factor)
        throw std::invalid_argument("bench_flow: inconsistent LR/HR factor");

    using clock = std::chrono::steady_clock;
    static volatile float sink = 0.0f;
    std::vector<double> lr_times(runs), hr_times(runs);
    for (int r = 0; r < runs; r++) {
        const auto t0 = clock::now();
        FlowField f = estimate_flow(lr_a, lr_b, params);
        FlowField up = bilinear_upsample(f, factor);
        for (float &v : up.data)
            v *= static_cast<float>(factor);
        const auto t1 = clock::now();
        FlowField fh = estimate_flow(hr_a, hr_b, params);
        const auto t2 = clock::now();
        sink = sink + up.data[0] + fh.data[0];
        lr_times[r] = std::chrono::duration<double>(t1 - t0).count();
        hr_times[r] = std::chrono::duration<double>(t2 - t1).count();
    }

    const auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };

    BenchReport rep;
    rep.runs = runs;
    rep.lr_flow_s = median(lr_times);
    rep.hr_flow_s = median(hr_times);
    rep.ratio = rep.hr_flow_s / rep.lr_flow_s;
    return rep;
}

int degrade_dir(const std::filesystem::path &in_dir,
                const std::filesystem::path &out_dir, int scale) {
    if (scale < 1)
        throw usage_error("degrade: scale must be >= 1");
    if (!std::filesystem::is_directory(in_dir))
        throw data_error("degrade: not a directory: " + in_dir.string());

    std::vector<std::filesystem::path> files;
    for (const auto &entry : std::filesystem::directory_iterator(in_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw data_error("degrade: no .png files in " + in_dir.string());

    std::filesystem::create_directories(out_dir);
    parallel_tasks(static_cast<int>(files.size()), [&](int i) {
        const Frame hr = read_png(files[i]);
        if (hr.height % scale != 0 || hr.width % scale != 0)
            throw data_error("degrade: dims of " + files[i].string() +
                             " are not divisible by " + std::to_string(scale));
        const Frame lq = bicubic_resize(hr, hr.height / scale, hr.width / scale);
        write_png(lq, out_dir / files[i].filename());
    });
    return static_cast<int>(files.size());
}

Frame synthetic_noise_frame(int height, int width, int channels, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    Frame raw(height, width, channels);
    for (float &v : raw.data)
        v = dist(rng);
    Frame smooth = gaussian_blur(raw, 1.5f);

    float lo = smooth.data[0], hi = smooth.data[0];
    for (float v : smooth.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const float span = std::max(hi - lo, 1e-6f);
    for (float &v : smooth.data)
        v = 0.05f + 0.9f * (v - lo) / span;
    return smooth;
}

} // namespace stsr
