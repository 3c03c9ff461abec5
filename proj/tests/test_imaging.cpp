#include <doctest.h>

#include <cmath>

#include "stsr/decompose.hpp"
#include "stsr/ref.hpp"
#include "stsr/resample.hpp"
#include "stsr/warp.hpp"
#include "test_util.hpp"

using namespace stsr;
using testutil::max_abs_diff;
using testutil::random_raster;

TEST_CASE("backward_warp: zero flow is the identity") {
    const Frame src = random_raster(9, 13, 3, 101);
    const FlowField zero = make_flow(9, 13);
    const Frame out = backward_warp(src, zero);
    CHECK(testutil::bit_identical(out, src));
}

TEST_CASE("backward_warp: integer shift with edge clamp") {
    Frame src(6, 8, 1);
    for (int y = 0; y < 6; y++)
        for (int x = 0; x < 8; x++)
            src.at(y, x, 0) = float(x) / 8.0f;
    const Frame out = backward_warp(src, make_flow(6, 8, 1.0f, 0.0f));
    for (int y = 0; y < 6; y++) {
        for (int x = 0; x < 7; x++)
            CHECK(out.at(y, x, 0) == src.at(y, x + 1, 0));
        CHECK(out.at(y, 7, 0) == src.at(y, 7, 0)); // edge replicated
    }
}

TEST_CASE("backward_warp: half-pixel shift averages neighbours, matches reference") {
    const Frame src = random_raster(8, 8, 1, 102);
    const FlowField half = make_flow(8, 8, 0.5f, 0.0f);
    const Frame out = backward_warp(src, half);
    for (int y = 0; y < 8; y++)
        for (int x = 0; x < 7; x++)
            CHECK(out.at(y, x, 0) ==
                  doctest::Approx(0.5f * (src.at(y, x, 0) + src.at(y, x + 1, 0)))
                      .epsilon(1e-6));
    const Frame want = ref::backward_warp(src, half);
    CHECK(max_abs_diff(out, want) < 1e-6f);
}

TEST_CASE("backward_warp: random flows match the scalar reference") {
    for (unsigned seed = 0; seed < 8; seed++) {
        const Frame src = random_raster(11, 7, 3, 200 + seed);
        const FlowField flow = testutil::random_flow(11, 7, 300 + seed, 3.0f);
        CHECK(max_abs_diff(backward_warp(src, flow), ref::backward_warp(src, flow)) < 1e-5f);
    }
}

TEST_CASE("backward_warp: dimension mismatch rejected") {
    const Frame src = random_raster(4, 4, 1, 1);
    CHECK_THROWS_AS(backward_warp(src, make_flow(4, 5)), std::invalid_argument);
}

TEST_CASE("forward_splat: zero flow keeps values and unit weights") {
    const Frame values = random_raster(5, 6, 1, 103);
    const auto [acc, w] = forward_splat(values, make_flow(5, 6));
    CHECK(max_abs_diff(acc, values) == 0.0f);
    for (float v : w.data)
        CHECK(v == 1.0f);
}

TEST_CASE("forward_splat: integer displacement moves all mass") {
    Frame values(8, 8, 1, 0.0f);
    values.at(3, 3, 0) = 2.0f;
    FlowField flow = make_flow(8, 8, 0.0f, 0.0f);
    flow.at(3, 3, 0) = 2.0f;
    const auto [acc, w] = forward_splat(values, flow);
    CHECK(acc.at(3, 5, 0) == 2.0f);
    CHECK(w.at(3, 5, 0) == doctest::Approx(2.0f)); // (3,5) also catches its own zero value
    for (int y = 0; y < 8; y++)
        for (int x = 0; x < 8; x++)
            if (!(y == 3 && x == 5))
                CHECK(acc.at(y, x, 0) == 0.0f);
}

TEST_CASE("forward_splat: fractional split and mass conservation") {
    Frame values(8, 8, 1, 0.0f);
    values.at(3, 3, 0) = 1.0f;
    FlowField flow(8, 8, 2, 0.0f);
    flow.at(3, 3, 0) = 1.25f;
    const auto [acc, w] = forward_splat(values, flow);
    CHECK(acc.at(3, 4, 0) == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(acc.at(3, 5, 0) == doctest::Approx(0.25).epsilon(1e-6));

    double total = 0.0;
    for (float v : w.data)
        total += v;
    CHECK(total == doctest::Approx(64.0).epsilon(1e-6)); // all targets in bounds
}

TEST_CASE("forward_splat: weight map bounded and conserves in-bounds mass") {
    for (unsigned seed = 0; seed < 6; seed++) {
        const Frame values = random_raster(8, 8, 2, 400 + seed);
        const FlowField flow = testutil::random_flow(8, 8, 500 + seed, 4.0f);
        const auto [acc, w] = forward_splat(values, flow);

        // independently count sources whose 4 splat targets all stay inside
        int fully_inside = 0;
        for (int y = 0; y < 8; y++)
            for (int x = 0; x < 8; x++) {
                const double tx = x + flow.at(y, x, 0), ty = y + flow.at(y, x, 1);
                const int x0 = int(std::floor(tx)), y0 = int(std::floor(ty));
                if (x0 >= 0 && x0 + 1 < 8 && y0 >= 0 && y0 + 1 < 8)
                    fully_inside++;
            }
        double total = 0.0;
        for (float v : w.data) {
            CHECK(v >= 0.0f);
            total += v;
        }
        CHECK(total >= fully_inside - 1e-3);
        CHECK(total <= 64.0 + 1e-3);

        const auto [racc, rw] = ref::forward_splat(values, flow);
        CHECK(max_abs_diff(acc, racc) < 1e-5f);
        CHECK(max_abs_diff(w, rw) < 1e-5f);
    }
}

TEST_CASE("bilinear_upsample: constants preserved exactly") {
    for (float c : {0.0f, 0.37f, 1.0f}) {
        const Frame field(5, 4, 3, c);
        const Frame up = bilinear_upsample(field, 4);
        CHECK(up.height == 20);
        CHECK(up.width == 16);
        for (float v : up.data)
            CHECK(v == c);
    }
}

TEST_CASE("bilinear_upsample: factor 1 is the identity") {
    const Frame f = random_raster(6, 5, 2, 104);
    CHECK(testutil::bit_identical(bilinear_upsample(f, 1), f));
}

TEST_CASE("bilinear_upsample: ramp matches the per-pixel oracle") {
    Frame f(2, 2, 1);
    f.at(0, 0, 0) = 0.0f;
    f.at(0, 1, 0) = 1.0f;
    f.at(1, 0, 0) = 2.0f;
    f.at(1, 1, 0) = 3.0f;
    const Frame up = bilinear_upsample(f, 2);
    const Frame want = ref::bilinear_upsample(f, 2);
    CHECK(max_abs_diff(up, want) < 1e-6f);

    const Frame r = random_raster(3, 7, 2, 105);
    CHECK(max_abs_diff(bilinear_upsample(r, 4), ref::bilinear_upsample(r, 4)) < 1e-6f);
}

TEST_CASE("bilinear_upsample: factor below 1 rejected") {
    CHECK_THROWS_AS(bilinear_upsample(Frame(2, 2, 1), 0), std::invalid_argument);
}

TEST_CASE("bicubic_resize: constants map to constants") {
    const Frame f(8, 8, 3, 0.42f);
    for (auto [oh, ow] : {std::pair{32, 32}, {2, 2}, {13, 5}}) {
        const Frame out = bicubic_resize(f, oh, ow);
        for (float v : out.data)
            CHECK(v == doctest::Approx(0.42f).epsilon(1e-6));
    }
    const Frame down = bicubic_resize(f, 2, 2);
    const Frame up = bicubic_resize(down, 8, 8);
    CHECK(max_abs_diff(up, f) < 1e-6f);
}

TEST_CASE("bicubic_resize: gradient upscale matches the scalar oracle") {
    Frame f(16, 16, 1);
    for (int y = 0; y < 16; y++)
        for (int x = 0; x < 16; x++)
            f.at(y, x, 0) = (x + y) / 30.0f;
    const Frame out = bicubic_resize(f, 64, 64);
    const Frame want = ref::bicubic_resize(f, 64, 64);
    CHECK(max_abs_diff(out, want) < 1e-5f);
}

TEST_CASE("bicubic_resize: random frames match the oracle both directions") {
    for (unsigned seed = 0; seed < 5; seed++) {
        const Frame f = random_raster(16, 16, 3, 600 + seed);
        CHECK(max_abs_diff(bicubic_resize(f, 64, 64), ref::bicubic_resize(f, 64, 64)) < 1e-5f);
        CHECK(max_abs_diff(bicubic_resize(f, 4, 4), ref::bicubic_resize(f, 4, 4)) < 1e-5f);
    }
}

TEST_CASE("structure_detail_decompose: reconstruction identity") {
    SUBCASE("constant frame: structure is the frame, detail is zero") {
        const Frame f(7, 7, 1, 0.3f);
        const auto [s, d] = structure_detail_decompose(f);
        CHECK(max_abs_diff(s, f) < 1e-6f);
        for (float v : d.data)
            CHECK(std::fabs(v) < 1e-6f);
    }
    SUBCASE("values in [0.5,1]: S + D == frame bit-for-bit") {
        // within a 2x dynamic range the defining subtraction is exact
        const Frame f = random_raster(10, 9, 3, 700, 0.5f, 1.0f);
        const auto [s, d] = structure_detail_decompose(f);
        for (size_t i = 0; i < f.data.size(); i++)
            CHECK(s.data[i] + d.data[i] == f.data[i]);
    }
    SUBCASE("arbitrary frames: reconstruction within one float ulp") {
        const Frame f = random_raster(10, 9, 3, 701);
        const auto [s, d] = structure_detail_decompose(f);
        for (size_t i = 0; i < f.data.size(); i++)
            CHECK(std::fabs(double(s.data[i]) + double(d.data[i]) - double(f.data[i])) <=
                  6e-8);
    }
}

TEST_CASE("structure_detail_decompose: impulse reproduces the discrete kernel") {
    const float sigma = 1.5f;
    const int radius = int(std::ceil(4.0f * sigma));
    Frame f(31, 31, 1, 0.0f);
    f.at(15, 15, 0) = 1.0f;
    const auto [s, d] = structure_detail_decompose(f, sigma);

    // directly evaluated separable kernel, same truncation and normalization
    double norm = 0.0;
    for (int i = -radius; i <= radius; i++)
        norm += std::exp(-0.5 * i * i / double(sigma * sigma));
    for (int dy = -radius; dy <= radius; dy++) {
        for (int dx = -radius; dx <= radius; dx++) {
            const double want = std::exp(-0.5 * dy * dy / double(sigma * sigma)) / norm *
                                std::exp(-0.5 * dx * dx / double(sigma * sigma)) / norm;
            CHECK(s.at(15 + dy, 15 + dx, 0) == doctest::Approx(want).epsilon(1e-5));
        }
    }
}
