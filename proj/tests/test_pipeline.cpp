#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "stsr/error.hpp"
#include "stsr/flo_io.hpp"
#include "stsr/pipeline.hpp"
#include "stsr/png_io.hpp"
#include "stsr/resample.hpp"
#include "test_util.hpp"

using namespace stsr;

namespace {

std::string frame_name(int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%08d.png", i);
    return buf;
}

std::string read_bytes(const std::filesystem::path &p) {
    std::ifstream is(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), {});
}

// n identical even frames
std::filesystem::path write_static_sequence(const std::string &tag, const Frame &lr,
                                            int evens) {
    const auto dir = testutil::scratch_dir(tag);
    for (int i = 0; i < evens; i++)
        write_png(lr, dir / frame_name(2 * i));
    return dir;
}

} // namespace

TEST_CASE("png round trip: quantized values and stable bytes") {
    const auto dir = testutil::scratch_dir("png");
    const Frame f = testutil::random_raster(9, 13, 3, 119);
    write_png(f, dir / "a.png");
    const Frame r = read_png(dir / "a.png");
    REQUIRE(r.same_shape(f));
    for (size_t i = 0; i < f.data.size(); i++) {
        const float want = std::lround(f.data[i] * 255.0f) / 255.0f;
        CHECK(std::fabs(r.data[i] - want) < 1e-6f);
    }
    // re-encoding the decoded frame reproduces the file bit for bit
    write_png(r, dir / "b.png");
    CHECK(read_bytes(dir / "a.png") == read_bytes(dir / "b.png"));

    const Frame g = testutil::random_raster(7, 7, 1, 120);
    write_png(g, dir / "g.png");
    CHECK(read_png(dir / "g.png").channels == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("scan_sequence: accepts contiguous evens, ignores odds") {
    const Frame lr(6, 8, 3, 0.5f);
    const auto dir = write_static_sequence("scan", lr, 4);
    write_png(lr, dir / frame_name(3)); // odd file must be ignored
    const SequenceManifest m = scan_sequence(dir);
    CHECK(m.frame_indices == std::vector<int>{0, 2, 4, 6});
    CHECK(m.height == 6);
    CHECK(m.width == 8);
    std::filesystem::remove_all(dir);
}

TEST_CASE("scan_sequence: gaps and empty dirs are fatal") {
    const Frame lr(6, 8, 1, 0.5f);
    const auto dir = testutil::scratch_dir("scan_bad");
    CHECK_THROWS_AS(scan_sequence(dir), data_error);
    write_png(lr, dir / frame_name(0));
    write_png(lr, dir / frame_name(4)); // missing 00000002.png
    CHECK_THROWS_AS(scan_sequence(dir), data_error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("run_pipeline: static scene reproduces the bicubic upscale") {
    const Frame lr = synthetic_noise_frame(24, 32, 3, 120);
    const auto dir = write_static_sequence("static", lr, 4);
    const auto out = testutil::scratch_dir("static_out");

    PipelineConfig cfg;
    cfg.out_dir = out;
    run_pipeline(scan_sequence(dir), cfg);

    const Frame lr_decoded = read_png(dir / frame_name(0));
    Frame want = bicubic_resize(lr_decoded, 96, 128);
    write_png(want, out / "want.png");
    want = read_png(out / "want.png"); // same quantization as the pipeline output

    for (int i = 0; i < 7; i++) {
        const Frame got = read_png(out / frame_name(i));
        CHECK(testutil::max_abs_diff(got, want) <= 1e-3f);
    }
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(out);
}

TEST_CASE("run_pipeline: 6 even inputs produce exactly 11 outputs") {
    const Frame lr = synthetic_noise_frame(24, 32, 3, 121);
    const auto dir = write_static_sequence("count", lr, 6);
    const auto out = testutil::scratch_dir("count_out");

    PipelineConfig cfg;
    cfg.out_dir = out;
    const int written = run_pipeline(scan_sequence(dir), cfg);
    CHECK(written == 11);
    for (int i = 0; i <= 10; i++)
        CHECK(std::filesystem::exists(out / frame_name(i)));
    CHECK(!std::filesystem::exists(out / frame_name(11)));
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(out);
}

TEST_CASE("run_pipeline: grayscale sequences are supported end to end") {
    Frame lr = synthetic_noise_frame(24, 32, 1, 126);
    const auto dir = write_static_sequence("gray", lr, 4);
    const auto out = testutil::scratch_dir("gray_out");
    PipelineConfig cfg;
    cfg.out_dir = out;
    cfg.flow.iterations_per_level = 30;
    run_pipeline(scan_sequence(dir), cfg);
    for (int i = 0; i <= 6; i++) {
        const Frame f = read_png(out / frame_name(i));
        CHECK(f.channels == 1);
        CHECK(f.height == 96);
        CHECK(f.width == 128);
    }
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(out);
}

TEST_CASE("run_pipeline: fewer than 4 even frames is fatal") {
    const Frame lr(8, 8, 1, 0.4f);
    const auto dir = write_static_sequence("short", lr, 3);
    PipelineConfig cfg;
    cfg.out_dir = testutil::scratch_dir("short_out");
    CHECK_THROWS_AS(run_pipeline(scan_sequence(dir), cfg), data_error);
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("run_pipeline: t values outside the gap rejected") {
    const Frame lr(16, 16, 1, 0.4f);
    const auto dir = write_static_sequence("badt", lr, 4);
    PipelineConfig cfg;
    cfg.out_dir = testutil::scratch_dir("badt_out");
    cfg.t_values = {2.0};
    CHECK_THROWS_AS(run_pipeline(scan_sequence(dir), cfg), usage_error);
    cfg.t_values = {};
    CHECK_THROWS_AS(run_pipeline(scan_sequence(dir), cfg), usage_error);
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("run_pipeline: deterministic across reruns and worker counts") {
    // moving content so flows are nontrivial
    const Frame base = synthetic_noise_frame(24, 32, 3, 122);
    const auto dir = testutil::scratch_dir("det");
    for (int i = 0; i < 4; i++) {
        const Frame f = testutil::add_blob(base, 8.0 + 3.0 * i, 12.0 + 1.5 * i, 3.0, 0.5);
        write_png(f, dir / frame_name(2 * i));
    }

    const auto out1 = testutil::scratch_dir("det_out1");
    const auto out2 = testutil::scratch_dir("det_out2");
    PipelineConfig cfg;
    cfg.flow.iterations_per_level = 30;
    cfg.out_dir = out1;
    cfg.workers = 1;
    cfg.emit_lr = true;
    run_pipeline(scan_sequence(dir), cfg);
    cfg.out_dir = out2;
    cfg.workers = 2;
    run_pipeline(scan_sequence(dir), cfg);

    for (int i = 0; i <= 6; i++)
        CHECK(read_bytes(out1 / frame_name(i)) == read_bytes(out2 / frame_name(i)));
    for (int i = 1; i <= 5; i += 2)
        CHECK(read_bytes(out1 / "lr" / frame_name(i)) ==
              read_bytes(out2 / "lr" / frame_name(i)));

    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(out1);
    std::filesystem::remove_all(out2);
}

TEST_CASE("run_pipeline: even outputs are independent of the refinement bundle") {
    const Frame base = synthetic_noise_frame(24, 32, 3, 123);
    const auto dir = testutil::scratch_dir("indep");
    for (int i = 0; i < 4; i++) {
        const Frame f = testutil::add_blob(base, 8.0 + 2.0 * i, 12.0, 3.0, 0.5);
        write_png(f, dir / frame_name(2 * i));
    }

    WeightBundle bias_bundle;
    {
        ConvLayer l;
        l.in_channels = 20;
        l.out_channels = 3;
        l.kernel_h = l.kernel_w = 1;
        l.activation = Activation::linear;
        l.weights.assign(60, 0.0f);
        l.bias = {0.05f, 0.0f, 0.0f};
        bias_bundle.layers = {l};
    }

    const auto out_plain = testutil::scratch_dir("indep_plain");
    const auto out_ref = testutil::scratch_dir("indep_ref");
    PipelineConfig cfg;
    cfg.flow.iterations_per_level = 30;
    cfg.out_dir = out_plain;
    run_pipeline(scan_sequence(dir), cfg);
    cfg.out_dir = out_ref;
    cfg.refine_weights = bias_bundle;
    run_pipeline(scan_sequence(dir), cfg);

    for (int i = 0; i <= 6; i += 2)
        CHECK(read_bytes(out_plain / frame_name(i)) == read_bytes(out_ref / frame_name(i)));
    for (int i = 1; i <= 5; i += 2)
        CHECK(read_bytes(out_plain / frame_name(i)) != read_bytes(out_ref / frame_name(i)));

    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(out_plain);
    std::filesystem::remove_all(out_ref);
}

TEST_CASE("run_pipeline: precomputed flows are loaded from --flow-dir") {
    const Frame lr = synthetic_noise_frame(16, 16, 3, 124);
    const auto dir = write_static_sequence("flodir", lr, 4);
    const auto flows = testutil::scratch_dir("flodir_flo");
    const FlowField zero = make_flow(16, 16);
    for (int j = 0; j < 3; j++) {
        write_flo(zero, flows / (std::to_string(2 * j) + "_" + std::to_string(2 * j + 2) + ".flo"));
        write_flo(zero, flows / (std::to_string(2 * j + 2) + "_" + std::to_string(2 * j) + ".flo"));
    }

    const auto out_flo = testutil::scratch_dir("flodir_out");
    const auto out_est = testutil::scratch_dir("flodir_out_est");
    PipelineConfig cfg;
    cfg.out_dir = out_flo;
    cfg.flow_dir = flows;
    run_pipeline(scan_sequence(dir), cfg);
    cfg.flow_dir.clear();
    cfg.out_dir = out_est;
    run_pipeline(scan_sequence(dir), cfg);

    // static scene: estimated flows are zero too, outputs must agree exactly
    for (int i = 0; i <= 6; i++)
        CHECK(read_bytes(out_flo / frame_name(i)) == read_bytes(out_est / frame_name(i)));

    // a missing .flo file is fatal
    std::filesystem::remove(flows / "0_2.flo");
    cfg.flow_dir = flows;
    cfg.out_dir = out_flo;
    CHECK_THROWS_AS(run_pipeline(scan_sequence(dir), cfg), data_error);

    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(flows);
    std::filesystem::remove_all(out_flo);
    std::filesystem::remove_all(out_est);
}

TEST_CASE("run_pipeline: emit-lr writes one LR frame per gap") {
    const Frame lr = synthetic_noise_frame(16, 16, 3, 125);
    const auto dir = write_static_sequence("emitlr", lr, 5);
    const auto out = testutil::scratch_dir("emitlr_out");
    PipelineConfig cfg;
    cfg.out_dir = out;
    cfg.emit_lr = true;
    run_pipeline(scan_sequence(dir), cfg);
    for (int i = 1; i <= 7; i += 2) {
        const Frame f = read_png(out / "lr" / frame_name(i));
        CHECK(f.height == 16);
        CHECK(f.width == 16);
    }
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(out);
}

TEST_CASE("evaluate_dirs: identical directories score 100 dB / 1.0") {
    const auto pred = testutil::scratch_dir("eval_pred");
    for (int i = 0; i < 4; i++)
        write_png(synthetic_noise_frame(16, 20, 3, 130 + i), pred / frame_name(i));
    const MetricReport r = evaluate_dirs(pred, pred);
    REQUIRE(r.frames.size() == 4);
    for (const auto &fm : r.frames) {
        CHECK(fm.psnr == 100.0);
        CHECK(fm.ssim == 1.0);
    }
    CHECK(r.even_psnr == 100.0);
    CHECK(r.odd_psnr == 100.0);
    CHECK(r.overall_psnr == 100.0);
    CHECK(r.even_count + r.odd_count == 4);
    std::filesystem::remove_all(pred);
}

TEST_CASE("evaluate_dirs: uniform grid-aligned offset gives the analytic PSNR") {
    // 26/255 offset survives 8-bit quantization exactly
    const auto pred = testutil::scratch_dir("eval_off_pred");
    const auto gt = testutil::scratch_dir("eval_off_gt");
    const Frame g(16, 16, 3, 100.0f / 255.0f);
    const Frame p(16, 16, 3, 126.0f / 255.0f);
    for (int i = 0; i < 3; i++) {
        write_png(g, gt / frame_name(i));
        write_png(p, pred / frame_name(i));
    }
    const MetricReport r = evaluate_dirs(pred, gt);
    const double want = 20.0 * std::log10(255.0 / 26.0);
    CHECK(r.even_psnr == doctest::Approx(want).epsilon(1e-6));
    CHECK(r.odd_psnr == doctest::Approx(want).epsilon(1e-6));
    CHECK(r.overall_psnr == doctest::Approx(want).epsilon(1e-6));
    std::filesystem::remove_all(pred);
    std::filesystem::remove_all(gt);
}

TEST_CASE("evaluate_dirs: aggregates equal the hand-averaged per-frame values") {
    const auto pred = testutil::scratch_dir("eval_avg_pred");
    const auto gt = testutil::scratch_dir("eval_avg_gt");
    for (int i = 0; i < 5; i++) {
        write_png(synthetic_noise_frame(16, 16, 3, 140 + i), gt / frame_name(i));
        write_png(synthetic_noise_frame(16, 16, 3, 150 + i), pred / frame_name(i));
    }
    const MetricReport r = evaluate_dirs(pred, gt);
    double even_p = 0, odd_p = 0, all_p = 0;
    int ne = 0, no = 0;
    for (const auto &fm : r.frames) {
        all_p += fm.psnr;
        (fm.odd ? odd_p : even_p) += fm.psnr;
        (fm.odd ? no : ne)++;
    }
    CHECK(ne == 3);
    CHECK(no == 2);
    CHECK(r.even_psnr == doctest::Approx(even_p / ne).epsilon(1e-12));
    CHECK(r.odd_psnr == doctest::Approx(odd_p / no).epsilon(1e-12));
    CHECK(r.overall_psnr == doctest::Approx(all_p / 5).epsilon(1e-12));
    std::filesystem::remove_all(pred);
    std::filesystem::remove_all(gt);
}

TEST_CASE("evaluate_dirs: missing counterpart is fatal and names the frame") {
    const auto pred = testutil::scratch_dir("eval_missing_pred");
    const auto gt = testutil::scratch_dir("eval_missing_gt");
    write_png(Frame(16, 16, 1, 0.5f), pred / frame_name(0));
    write_png(Frame(16, 16, 1, 0.5f), gt / frame_name(0));
    write_png(Frame(16, 16, 1, 0.5f), pred / frame_name(1));
    try {
        evaluate_dirs(pred, gt);
        FAIL("expected data_error");
    } catch (const data_error &e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
    std::filesystem::remove_all(pred);
    std::filesystem::remove_all(gt);
}

TEST_CASE("degrade_dir: constants at quarter size, non-divisible dims fatal") {
    const auto in = testutil::scratch_dir("deg_in");
    const auto out = testutil::scratch_dir("deg_out");
    write_png(Frame(32, 48, 3, 0.5f), in / frame_name(0));
    const int count = degrade_dir(in, out, 4);
    CHECK(count == 1);
    const Frame lr = read_png(out / frame_name(0));
    CHECK(lr.height == 8);
    CHECK(lr.width == 12);
    for (float v : lr.data)
        CHECK(v == doctest::Approx(0.5f).epsilon(1e-2)); // one quantization step

    write_png(Frame(9, 9, 1, 0.5f), in / frame_name(2));
    CHECK_THROWS_AS(degrade_dir(in, out, 4), data_error);
    std::filesystem::remove_all(in);
    std::filesystem::remove_all(out);
}

TEST_CASE("bench_flow: degenerate equal-size pair has ratio near 1") {
    const Frame a = synthetic_noise_frame(64, 64, 1, 160);
    const Frame b = synthetic_noise_frame(64, 64, 1, 161);
    FlowParams p;
    p.pyramid_levels = 3;
    p.iterations_per_level = 40;
    const BenchReport r = bench_flow(a, b, a, b, p, 5);
    CHECK(r.runs == 5);
    CHECK(r.ratio > 0.3);
    CHECK(r.ratio < 3.0);
}

TEST_CASE("bench_flow: doubling the iteration budget roughly doubles the time") {
    // workload sized so a run is ~100 ms; below that scheduler noise
    // dominates and the ratio is meaningless
    const Frame a = synthetic_noise_frame(256, 256, 1, 162);
    const Frame b = synthetic_noise_frame(256, 256, 1, 163);
    FlowParams p;
    p.pyramid_levels = 2;
    p.iterations_per_level = 300;
    const BenchReport r1 = bench_flow(a, b, a, b, p, 5);
    p.iterations_per_level = 600;
    const BenchReport r2 = bench_flow(a, b, a, b, p, 5);
    CHECK(r2.hr_flow_s > 1.3 * r1.hr_flow_s);
    CHECK(r2.hr_flow_s < 3.0 * r1.hr_flow_s);
}

TEST_CASE("bench_flow: mismatched factor rejected") {
    const Frame lr(16, 16, 1, 0.5f);
    const Frame hr(48, 32, 1, 0.5f);
    CHECK_THROWS_AS(bench_flow(lr, lr, hr, hr, FlowParams{}, 5), std::invalid_argument);
}
