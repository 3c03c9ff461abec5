#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stsr/error.hpp"
#include "stsr/pipeline.hpp"
#include "stsr/png_io.hpp"

namespace fs = std::filesystem;

namespace {

struct RunOptions {
    std::string in, out, flow_dir, hr_dir;
    std::string refine_weights, mask_weights, flow_refine_weights;
    std::vector<double> t_values;
    int workers = 0;
    bool emit_lr = false;
    bool linear_motion = false;
    stsr::FlowParams flow;
};

void add_flow_options(CLI::App *cmd, stsr::FlowParams &p) {
    cmd->add_option("--flow-levels", p.pyramid_levels, "pyramid levels")
        ->capture_default_str();
    cmd->add_option("--flow-iters", p.iterations_per_level, "Jacobi iterations per level")
        ->capture_default_str();
    cmd->add_option("--flow-alpha", p.smoothness_alpha, "smoothness weight")
        ->capture_default_str();
}

int do_run(const RunOptions &opt) {
    stsr::SequenceManifest manifest = stsr::scan_sequence(opt.in);

    stsr::PipelineConfig cfg;
    cfg.out_dir = opt.out;
    cfg.flow = opt.flow;
    cfg.workers = opt.workers;
    cfg.emit_lr = opt.emit_lr;
    cfg.linear_motion = opt.linear_motion;
    if (!opt.t_values.empty())
        cfg.t_values = opt.t_values;
    if (!opt.flow_dir.empty())
        cfg.flow_dir = opt.flow_dir;
    if (!opt.hr_dir.empty()) {
        cfg.sr.kind = stsr::SrMethod::Kind::precomputed;
        cfg.sr.dir = opt.hr_dir;
    }
    if (!opt.refine_weights.empty())
        cfg.refine_weights = stsr::read_weight_bundle(opt.refine_weights);
    if (!opt.mask_weights.empty())
        cfg.mask_weights = stsr::read_weight_bundle(opt.mask_weights);
    if (!opt.flow_refine_weights.empty())
        cfg.flow_refine_weights = stsr::read_weight_bundle(opt.flow_refine_weights);

    const int written = stsr::run_pipeline(manifest, cfg);
    std::printf("wrote %d frames to %s\n", written, opt.out.c_str());
    return 0;
}

// Expand `--config <file>` (or --config=<file>) in place: each non-comment
// `key=value` line becomes `--key value`; `key=true` lines become bare
// flags and `key=false` lines are dropped. Repeat a key to pass a flag
// several times (e.g. two `t=` lines).
std::vector<std::string> expand_config_args(int argc, char **argv) {
    std::vector<std::string> out;
    for (int i = 0; i < argc; i++) {
        std::string arg = argv[i];
        std::string cfg_path;
        if (arg == "--config" && i + 1 < argc)
            cfg_path = argv[++i];
        else if (arg.rfind("--config=", 0) == 0)
            cfg_path = arg.substr(9);
        if (cfg_path.empty()) {
            out.push_back(std::move(arg));
            continue;
        }
        std::ifstream is(cfg_path);
        if (!is)
            throw stsr::usage_error("cannot open config file " + cfg_path);
        std::string line;
        while (std::getline(is, line)) {
            const size_t start = line.find_first_not_of(" \t");
            if (start == std::string::npos || line[start] == '#')
                continue;
            const size_t eq = line.find('=', start);
            if (eq == std::string::npos)
                throw stsr::usage_error("config line without '=': " + line);
            std::string key = line.substr(start, eq - start);
            std::string value = line.substr(eq + 1);
            const auto trim = [](std::string &s) {
                const size_t a = s.find_first_not_of(" \t\r");
                const size_t b = s.find_last_not_of(" \t\r");
                s = (a == std::string::npos) ? "" : s.substr(a, b - a + 1);
            };
            trim(key);
            trim(value);
            if (value == "false")
                continue;
            out.push_back("--" + key);
            if (value != "true")
                out.push_back(value);
        }
    }
    return out;
}

// first two frames of a directory, sorted by name
std::pair<stsr::Frame, stsr::Frame> load_pair(const std::string &dir) {
    std::vector<fs::path> files;
    for (const auto &e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".png")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.size() < 2)
        throw stsr::data_error("bench: need at least two .png frames in " + dir);
    return {stsr::read_png(files[0]), stsr::read_png(files[1])};
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"stsr: space-time video super-resolution (x4 spatial, x2 temporal)"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App *run = app.add_subcommand("run", "interpolate and super-resolve a sequence");
    run->add_option("--config", "flat key=value file mirroring the flags (expanded before parsing)");
    run->add_option("--in", run_opt.in, "directory of even LR frames <%08d>.png")->required();
    run->add_option("--out", run_opt.out, "output directory")->required();
    run->add_option("--flow-dir", run_opt.flow_dir, "load <i>_<j>.flo instead of estimating");
    run->add_option("--hr-dir", run_opt.hr_dir, "precomputed HR frames (same names as LR)");
    run->add_option("--refine-weights", run_opt.refine_weights, "frame refinement bundle");
    run->add_option("--mask-weights", run_opt.mask_weights, "blending mask bundle");
    run->add_option("--flow-refine-weights", run_opt.flow_refine_weights, "flow refinement bundle");
    run->add_option("--t", run_opt.t_values, "interpolation time(s) in (2,4), repeatable");
    run->add_option("--workers", run_opt.workers, "worker threads (0 = all cores)");
    run->add_flag("--emit-lr", run_opt.emit_lr, "also write LR synthesized frames");
    run->add_flag("--linear-motion", run_opt.linear_motion,
                  "zero the acceleration term (ablation baseline)");
    add_flow_options(run, run_opt.flow);

    std::string eval_pred, eval_gt, eval_out;
    int eval_workers = 0;
    CLI::App *eval = app.add_subcommand("eval", "PSNR/SSIM report against ground truth");
    eval->add_option("--config", "flat key=value file mirroring the flags (expanded before parsing)");
    eval->add_option("--in", eval_pred, "predicted frames directory")->required();
    eval->add_option("--gt", eval_gt, "ground truth directory")->required();
    eval->add_option("--out", eval_out, "also write the CSV report to this file");
    eval->add_option("--workers", eval_workers, "worker threads (0 = all cores)");

    std::string bench_in, bench_hr;
    unsigned bench_seed = 1;
    int bench_runs = 5, bench_workers = 0;
    stsr::FlowParams bench_flow_params;
    CLI::App *bench = app.add_subcommand(
        "bench", "time LR-flow-plus-upsample against direct HR flow");
    bench->add_option("--config", "flat key=value file mirroring the flags (expanded before parsing)");
    bench->add_option("--in", bench_in, "LR frame pair directory (synthetic if omitted)");
    bench->add_option("--hr-dir", bench_hr, "HR frame pair directory (synthetic if omitted)");
    bench->add_option("--seed", bench_seed, "seed for the synthetic frames");
    bench->add_option("--runs", bench_runs, "timing repetitions (median is reported)");
    bench->add_option("--workers", bench_workers, "worker threads (0 = all cores)");
    add_flow_options(bench, bench_flow_params);

    std::string deg_in, deg_out;
    int deg_scale = 4, deg_workers = 0;
    CLI::App *degrade = app.add_subcommand("degrade", "bicubic-downscale a frame directory");
    degrade->add_option("--config", "flat key=value file mirroring the flags (expanded before parsing)");
    degrade->add_option("--in", deg_in, "HR frames directory")->required();
    degrade->add_option("--out", deg_out, "LR output directory")->required();
    degrade->add_option("--scale", deg_scale, "downscale factor")->capture_default_str();
    degrade->add_option("--workers", deg_workers, "worker threads (0 = all cores)");

    std::vector<std::string> args;
    try {
        args = expand_config_args(argc, argv);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::vector<const char *> argp;
    argp.reserve(args.size());
    for (const std::string &a : args)
        argp.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argp.size()), argp.data());
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed())
            return do_run(run_opt);

        if (eval->parsed()) {
            stsr::set_worker_count(eval_workers);
            stsr::MetricReport report = stsr::evaluate_dirs(eval_pred, eval_gt);
            report.write_csv(std::cout);
            if (!eval_out.empty()) {
                std::ofstream os(eval_out);
                if (!os)
                    throw stsr::data_error("eval: cannot write " + eval_out);
                report.write_csv(os);
            }
            return 0;
        }

        if (bench->parsed()) {
            stsr::set_worker_count(bench_workers);
            stsr::Frame lr_a, lr_b, hr_a, hr_b;
            if (!bench_in.empty() && !bench_hr.empty()) {
                std::tie(lr_a, lr_b) = load_pair(bench_in);
                std::tie(hr_a, hr_b) = load_pair(bench_hr);
            } else if (bench_in.empty() && bench_hr.empty()) {
                lr_a = stsr::synthetic_noise_frame(180, 320, 3, bench_seed);
                lr_b = stsr::synthetic_noise_frame(180, 320, 3, bench_seed + 1);
                hr_a = stsr::synthetic_noise_frame(720, 1280, 3, bench_seed + 2);
                hr_b = stsr::synthetic_noise_frame(720, 1280, 3, bench_seed + 3);
            } else {
                throw stsr::usage_error("bench: give both --in and --hr-dir, or neither");
            }
            const stsr::BenchReport rep =
                stsr::bench_flow(lr_a, lr_b, hr_a, hr_b, bench_flow_params, bench_runs);
            std::printf("runs: %d\n", rep.runs);
            std::printf("lr_flow_plus_upsample_s: %.6f\n", rep.lr_flow_s);
            std::printf("hr_flow_s: %.6f\n", rep.hr_flow_s);
            std::printf("ratio: %.3f\n", rep.ratio);
            return 0;
        }

        if (degrade->parsed()) {
            stsr::set_worker_count(deg_workers);
            const int count = stsr::degrade_dir(deg_in, deg_out, deg_scale);
            std::printf("degraded %d frames into %s\n", count, deg_out.c_str());
            return 0;
        }
    } catch (const stsr::usage_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
