#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "doctest.h"
#include "mivkit/curves.hpp"
#include "mivkit/text_util.hpp"
#include "test_fixtures.hpp"

using namespace mivkit;

namespace {

const ModelParams kP0 = testing::reference_params();
const ModelConstants kC0;

DeviceCurve linear_curve(CurveKind kind, double bias, const std::vector<double>& values) {
    DeviceCurve c;
    c.kind = kind;
    c.fixed_bias = bias;
    for (size_t i = 0; i < values.size(); ++i)
        c.samples.push_back({0.1 * static_cast<double>(i), values[i]});
    return c;
}

}  // namespace

TEST_CASE("region error basics") {
    DeviceCurve ref = linear_curve(CurveKind::idvd, 1.0, {1e-5, 2e-5, 3e-5, 4e-5, 5e-5});
    CHECK(region_error(ref, ref) == 0.0);

    DeviceCurve scaled = ref;
    for (auto& s : scaled.samples) s.value *= 1.05;
    CHECK(region_error(scaled, ref) == doctest::Approx(5.0).epsilon(1e-12));

    DeviceCurve shifted = ref;
    shifted.samples[2].sweep_v += 0.01;
    CHECK_THROWS(region_error(shifted, ref));
}

TEST_CASE("region error worked five-point hybrid example") {
    // Two samples below 1 uA score on log10, three score linearly; the frozen
    // expectation comes from tests/oracle/golden_values.py.
    DeviceCurve ref = linear_curve(CurveKind::idvg_high, 1.0, {2e-9, 3e-7, 5e-6, 4e-5, 9e-5});
    DeviceCurve mod = linear_curve(CurveKind::idvg_high, 1.0, {3e-9, 2.4e-7, 5.4e-6, 3.8e-5, 9.6e-5});
    CHECK(region_error(mod, ref) == doctest::Approx(4.1552705368855394).epsilon(1e-12));
}

TEST_CASE("synthetic generation: zero noise equals the model point-wise") {
    CharacterizationSet set = generate_synthetic(kP0, kC0, Variant::traditional, 0.0, 42);
    set.validate();
    CHECK(set.curves.size() == 7);
    const DeviceCurve& high = set.find(CurveKind::idvg_high);
    CHECK(high.samples.size() == 41);
    for (const auto& s : high.samples)
        CHECK(s.value == drain_current(kP0, kC0, {s.sweep_v, 1.0}));
    const DeviceCurve& cv = set.find(CurveKind::cv);
    CHECK(cv.samples.size() == 61);
    CHECK(cv.samples.front().sweep_v == doctest::Approx(-0.5));
    for (const auto& s : cv.samples) CHECK(s.value == gate_capacitance(kP0, kC0, s.sweep_v));
}

TEST_CASE("synthetic generation is deterministic in the seed") {
    CharacterizationSet a = generate_synthetic(kP0, kC0, Variant::ch2, 0.01, 123);
    CharacterizationSet b = generate_synthetic(kP0, kC0, Variant::ch2, 0.01, 123);
    CHECK(curves_text(a) == curves_text(b));
    CharacterizationSet c = generate_synthetic(kP0, kC0, Variant::ch2, 0.01, 124);
    CHECK(curves_text(a) != curves_text(c));
}

TEST_CASE("synthetic noise level is statistically correct over 100 seeds") {
    // mean over seeds of the per-curve sample stddev of (noisy/clean - 1)
    CharacterizationSet clean = generate_synthetic(kP0, kC0, Variant::traditional, 0.0, 0);
    for (size_t ci = 0; ci < clean.curves.size(); ++ci) {
        double mean_sd = 0.0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            CharacterizationSet noisy = generate_synthetic(kP0, kC0, Variant::traditional, 0.01, seed);
            const auto& cs = clean.curves[ci].samples;
            const auto& ns = noisy.curves[ci].samples;
            double sum = 0.0, sum2 = 0.0;
            size_t n = 0;
            for (size_t i = 0; i < cs.size(); ++i) {
                if (cs[i].value == 0.0) continue;  // vds = 0 point of IDVD curves
                const double r = ns[i].value / cs[i].value - 1.0;
                sum += r;
                sum2 += r * r;
                ++n;
            }
            REQUIRE(n >= 40);
            const double var = (sum2 - sum * sum / n) / (n - 1);
            mean_sd += std::sqrt(var);
        }
        mean_sd /= 100.0;
        CHECK(mean_sd > 0.007);
        CHECK(mean_sd < 0.013);
    }
}

TEST_CASE("curve files round-trip byte-identically") {
    CharacterizationSet set = generate_synthetic(kP0, kC0, Variant::ch4, 0.01, 9);
    const std::string path = "/tmp/mivkit_curves_roundtrip.csv";
    write_curves(set, path);
    CharacterizationSet back = read_curves(path);
    CHECK(curves_text(back) == read_file(path));
    CHECK(back.polarity == set.polarity);
    CHECK(back.curves.size() == 7);
    std::remove(path.c_str());
}

TEST_CASE("curve parser rejects malformed input with line numbers") {
    const std::string good = curves_text(generate_synthetic(kP0, kC0, Variant::ch1, 0.0, 1));

    CHECK_THROWS_WITH_AS(parse_curves_text("# wrong header\n", "f"),
                         doctest::Contains("f:1"), std::runtime_error);

    // duplicate sweep point: repeat the first sample line of the first curve
    std::string dup = good;
    const size_t curve_pos = dup.find("CURVE");
    const size_t line_start = dup.find('\n', curve_pos) + 1;
    const size_t line_end = dup.find('\n', line_start) + 1;
    dup.insert(line_end, dup.substr(line_start, line_end - line_start));
    CHECK_THROWS_WITH_AS(parse_curves_text(dup, "f"), doctest::Contains("duplicate sweep point"),
                         std::runtime_error);

    // missing curve kind: drop the CV curve entirely
    std::string missing = good.substr(0, good.rfind("CURVE"));
    CHECK_THROWS_WITH_AS(parse_curves_text(missing, "f"), doctest::Contains("exactly one"),
                         std::runtime_error);

    CHECK_THROWS_AS(read_curves("/nonexistent/path.csv"), std::runtime_error);
}

TEST_CASE("synthetic rejects out-of-range noise") {
    CHECK_THROWS_AS(generate_synthetic(kP0, kC0, Variant::ch1, 0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_synthetic(kP0, kC0, Variant::ch1, -0.01, 1), std::invalid_argument);
}
