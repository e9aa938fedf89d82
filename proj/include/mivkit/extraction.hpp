#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mivkit/curves.hpp"
#include "mivkit/device_model.hpp"

namespace mivkit {

struct ParamBound {
    double lower = 0.0;
    double upper = 0.0;
    double initial = 0.0;
};

// Per-parameter (lower, upper, initial) triples keyed by the canonical
// upper-case parameter name. std::map keeps iteration order stable.
struct ParamBounds {
    std::map<std::string, ParamBound> entries;

    const ParamBound& at(const std::string& name) const;
    void validate() const;  // lower < upper, initial within bounds
};

// Text format: `NAME lower upper initial` per line, '#' comments.
ParamBounds read_bounds(const std::string& path);
ParamBounds parse_bounds_text(const std::string& text, const std::string& diag_name);
void write_bounds(const ParamBounds& bounds, const std::string& path);

// Physically plausible default ranges; shipped as data/default.bounds.
ParamBounds default_bounds();

struct ExtractionStage {
    std::string name;                     // low_drain / high_drain / capacitance
    std::vector<std::string> free_params; // optimized with their full bounds
    std::vector<std::string> fine_tune;   // optimized within +-10% of current value
    std::vector<CurveKind> target_kinds;
    std::vector<std::string> carry_forward;  // handed to the next stage for fine-tuning
};

// The three-stage schedule: low-drain IDVG, high-drain IDVG plus the IDVD
// family, then capacitance with a +-10% fine-tune of the DC parameters.
const std::vector<ExtractionStage>& standard_stages();

struct StageOutcome {
    ModelParams params;
    double objective_before = 0.0;
    double objective_after = 0.0;
    int iterations = 0;
    std::vector<std::string> warnings;  // e.g. fitted value pinned at a bound
};

struct ExtractionReport {
    ModelParams fitted;
    double idvg_error_pct = 0.0;  // mean of IDVG_LOW and IDVG_HIGH
    double idvd_error_pct = 0.0;  // mean over the four gate biases
    double cv_error_pct = 0.0;
    std::vector<int> stage_iterations;
    std::vector<std::string> warnings;
    double wall_seconds = 0.0;  // diagnostic only; never serialized
};

// Stage objective: sum of region errors over the stage's target kinds with
// the IDVD family averaged into a single term.
double stage_objective(const ExtractionStage& stage, const ModelParams& params,
                       const ModelConstants& consts, const CharacterizationSet& target);

// Runs one stage. Only stage-free (and fine-tune) entries may change; the
// stage objective never increases relative to the input parameters.
StageOutcome run_stage(const ExtractionStage& stage, const ModelParams& current,
                       const ParamBounds& bounds, const ModelConstants& consts,
                       const CharacterizationSet& target, std::uint64_t seed);

// Full three-stage pipeline from the bounds' initial values.
ExtractionReport extract(const CharacterizationSet& target, const ParamBounds& bounds,
                         const ModelConstants& consts, std::uint64_t seed = 0);

// Region errors of a parameter set against a target, as reported.
void report_errors(const ModelParams& params, const ModelConstants& consts,
                   const CharacterizationSet& target, double& idvg_pct, double& idvd_pct,
                   double& cv_pct);

}  // namespace mivkit
