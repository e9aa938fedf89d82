#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mivkit/device_model.hpp"

namespace mivkit {

enum class Variant { traditional, ch1, ch2, ch4 };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);
inline constexpr int kNumVariants = 4;
const std::vector<Variant>& all_variants();

enum class CurveKind { idvg_low, idvg_high, idvd, cv };

std::string to_string(CurveKind k);
CurveKind curve_kind_from_string(const std::string& s);

inline constexpr double kIdvgLowVds = 0.05;
inline constexpr double kIdvgHighVds = 1.0;
inline constexpr double kVdd = 1.0;
// IDVD gate biases, one curve per bias.
inline constexpr double kIdvdBiases[4] = {0.4, 0.6, 0.8, 1.0};

struct CurveSample {
    double sweep_v = 0.0;
    double value = 0.0;  // A for current curves, F for CV
};

// One sampled characteristic. For p-polarity devices the sweep stores
// source-referenced magnitudes (|Vgs|, |Vds|) and current magnitudes, which
// keeps grids increasing and makes the mirror transparent to the fitter.
struct DeviceCurve {
    CurveKind kind = CurveKind::idvg_low;
    double fixed_bias = 0.0;  // Vds for IDVG kinds, Vgs for IDVD, 0 for CV
    Polarity polarity = Polarity::n;
    std::vector<CurveSample> samples;
};

// Complete target for one device: one IDVG_LOW, one IDVG_HIGH, four IDVD
// (biases 0.4/0.6/0.8/1.0) and one CV, all of one polarity.
struct CharacterizationSet {
    Variant variant = Variant::traditional;
    Polarity polarity = Polarity::n;
    std::vector<DeviceCurve> curves;

    const DeviceCurve& find(CurveKind kind, double fixed_bias = 0.0) const;
    void validate() const;  // throws std::runtime_error on invariant violation
};

// Curve CSV (schema `# miv-cellkit curves v1`); read_curves leaves the
// variant at its default since the file does not carry it.
CharacterizationSet read_curves(const std::string& path);
CharacterizationSet parse_curves_text(const std::string& text, const std::string& diag_name);
void write_curves(const CharacterizationSet& set, const std::string& path);
std::string curves_text(const CharacterizationSet& set);

// Normalized mean absolute error in percent. IDVG curves are scored on a
// hybrid scale: log10|I| where |Iref| < 1 uA, linear elsewhere, the two
// branch means averaged with equal weight.
double region_error(const DeviceCurve& model, const DeviceCurve& reference);

// Noise-free model curves on the canonical grids (IDVG/IDVD 0..1 V and CV
// -0.5..1 V, 25 mV steps).
CharacterizationSet model_curves(const ModelParams& params, const ModelConstants& consts,
                                 Variant variant);

// Evaluate `params` on the grids of `target` (used by the extraction
// objective when the target grids are not canonical).
DeviceCurve model_curve_like(const ModelParams& params, const ModelConstants& consts,
                             const DeviceCurve& target);

// Canonical-grid sampling of the model with multiplicative Gaussian noise of
// relative sigma noise_rel, deterministic in seed.
CharacterizationSet generate_synthetic(const ModelParams& true_params, const ModelConstants& consts,
                                       Variant variant, double noise_rel, std::uint64_t seed);

// Deterministic N(0,1) stream: mt19937_64 (engine output is pinned by the
// standard) + explicit Box-Muller, so values do not depend on library
// distribution internals.
class GaussianRng {
  public:
    explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}
    double next();

  private:
    double uniform01();
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stable stream-splitting helper: mixes a label into a seed so independent
// tasks get independent, order-free streams.
std::uint64_t mix_seed(std::uint64_t seed, const std::string& label);

}  // namespace mivkit
