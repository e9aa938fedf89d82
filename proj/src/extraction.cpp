#include "mivkit/extraction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mivkit/model_io.hpp"
#include "mivkit/nelder_mead.hpp"
#include "mivkit/text_util.hpp"

namespace mivkit {

const ParamBound& ParamBounds::at(const std::string& name) const {
    auto it = entries.find(name);
    if (it == entries.end()) throw std::runtime_error("bounds missing parameter '" + name + "'");
    return it->second;
}

void ParamBounds::validate() const {
    for (const auto& [name, b] : entries) {
        if (!(b.lower < b.upper))
            throw std::runtime_error("bounds for " + name + ": lower must be < upper");
        if (b.initial < b.lower || b.initial > b.upper)
            throw std::runtime_error("bounds for " + name + ": initial outside [lower, upper]");
        param_field(name);  // rejects unknown parameter names
    }
}

ParamBounds parse_bounds_text(const std::string& text, const std::string& diag_name) {
    ParamBounds bounds;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error(diag_name + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        std::istringstream ls(body);
        std::string name, lo, hi, init, extra;
        ls >> name >> lo >> hi >> init;
        if (init.empty()) fail("expected 'NAME lower upper initial'");
        if (ls >> extra) fail("trailing token '" + extra + "'");
        std::transform(name.begin(), name.end(), name.begin(), ::toupper);
        ParamBound b;
        b.lower = parse_number(lo, fail);
        b.upper = parse_number(hi, fail);
        b.initial = parse_number(init, fail);
        if (!bounds.entries.emplace(name, b).second) fail("duplicate parameter '" + name + "'");
    }
    bounds.validate();
    return bounds;
}

ParamBounds read_bounds(const std::string& path) {
    return parse_bounds_text(read_file(path), path);
}

void write_bounds(const ParamBounds& bounds, const std::string& path) {
    std::ostringstream out;
    out << "# parameter lower upper initial\n";
    for (const auto& [name, b] : bounds.entries)
        out << name << " " << format_double(b.lower) << " " << format_double(b.upper) << " "
            << format_double(b.initial) << "\n";
    write_file_atomic(path, out.str());
}

ParamBounds default_bounds() {
    ParamBounds b;
    auto set = [&](const char* name, double lo, double hi, double init) {
        b.entries[name] = {lo, hi, init};
    };
    set("VTH0", 0.1, 0.6, 0.35);
    set("DELVT", -0.2, 0.2, 0.0);
    set("U0", 0.005, 0.1, 0.03);
    set("UA", 0.0, 1.0, 0.2);
    set("UB", 0.0, 0.3, 0.05);
    set("UD", 0.0, 0.3, 0.02);
    set("UCS", 0.0, 3.0, 1.5);
    set("CDSC", 0.0, 0.5, 0.1);
    set("CDSCD", 0.0, 0.5, 0.05);
    set("DVT0", 0.0, 2.0, 0.5);
    set("DVT1", 0.05, 3.0, 0.5);
    set("ETAB", 0.0, 0.2, 0.05);
    set("VSAT", 2e4, 5e5, 1e5);
    set("PVAG", 0.0, 0.5, 0.1);
    set("CKAPPA", 0.05, 2.0, 0.5);
    set("CF", 0.0, 1e-16, 2e-17);
    set("CGSO", 0.0, 1e-9, 1e-10);
    set("CGDO", 0.0, 1e-9, 1e-10);
    set("CGSL", 0.0, 5e-10, 5e-11);
    set("CGDL", 0.0, 5e-10, 5e-11);
    set("MOIN", 1.0, 20.0, 5.0);
    return b;
}

const std::vector<ExtractionStage>& standard_stages() {
    static const std::vector<ExtractionStage> stages = {
        {"low_drain",
         {"CDSC", "U0", "UA", "UB", "UD", "UCS", "DVT0", "DVT1"},
         {},
         {CurveKind::idvg_low},
         {"U0", "UA", "DVT0", "DVT1"}},
        {"high_drain",
         {"CDSCD", "VTH0", "PVAG", "ETAB", "VSAT"},
         {"CDSC", "U0", "UA", "DVT0", "DVT1"},
         {CurveKind::idvg_high, CurveKind::idvd},
         {}},
        {"capacitance",
         {"CKAPPA", "DELVT", "CF", "CGSO", "CGDO", "MOIN", "CGSL", "CGDL"},
         {"CDSC", "CDSCD", "U0", "UA", "UB", "UD", "UCS", "VTH0", "PVAG", "DVT0", "DVT1", "ETAB",
          "VSAT"},
         {CurveKind::cv, CurveKind::idvg_low, CurveKind::idvg_high, CurveKind::idvd},
         {}},
    };
    return stages;
}

double stage_objective(const ExtractionStage& stage, const ModelParams& params,
                       const ModelConstants& consts, const CharacterizationSet& target) {
    double total = 0.0;
    for (CurveKind kind : stage.target_kinds) {
        if (kind == CurveKind::idvd) {
            double acc = 0.0;
            for (double bias : kIdvdBiases) {
                const DeviceCurve& ref = target.find(CurveKind::idvd, bias);
                acc += region_error(model_curve_like(params, consts, ref), ref);
            }
            total += acc / 4.0;
        } else {
            const DeviceCurve& ref = target.find(kind);
            total += region_error(model_curve_like(params, consts, ref), ref);
        }
    }
    return total;
}

namespace {

struct FreeParam {
    std::string name;
    double ModelParams::* field;
    double lo;
    double hi;
    double start;
};

std::vector<FreeParam> stage_vector(const ExtractionStage& stage, const ModelParams& current,
                                    const ParamBounds& bounds) {
    std::vector<FreeParam> v;
    for (const auto& name : stage.free_params) {
        const ParamBound& b = bounds.at(name);
        double start = std::clamp(current.*param_field(name), b.lower, b.upper);
        v.push_back({name, param_field(name), b.lower, b.upper, start});
    }
    for (const auto& name : stage.fine_tune) {
        const ParamBound& b = bounds.at(name);
        const double cur = std::clamp(current.*param_field(name), b.lower, b.upper);
        const double window = std::max(0.1 * std::fabs(cur), 0.01 * (b.upper - b.lower));
        const double lo = std::max(b.lower, cur - window);
        const double hi = std::min(b.upper, cur + window);
        v.push_back({name, param_field(name), lo, hi, std::clamp(cur, lo, hi)});
    }
    return v;
}

}  // namespace

StageOutcome run_stage(const ExtractionStage& stage, const ModelParams& current,
                       const ParamBounds& bounds, const ModelConstants& consts,
                       const CharacterizationSet& target, std::uint64_t seed) {
    for (CurveKind kind : stage.target_kinds) target.find(kind, kIdvdBiases[0]);
    validate(current);

    const std::vector<FreeParam> free = stage_vector(stage, current, bounds);
    std::vector<double> lo, hi, x0;
    for (const auto& f : free) {
        lo.push_back(f.lo);
        hi.push_back(f.hi);
        x0.push_back(f.start);
    }

    auto apply = [&](const std::vector<double>& x) {
        ModelParams p = current;
        for (size_t i = 0; i < free.size(); ++i) p.*free[i].field = x[i];
        return p;
    };
    auto objective = [&](const std::vector<double>& x) {
        return stage_objective(stage, apply(x), consts, target);
    };

    StageOutcome out;
    out.objective_before = stage_objective(stage, current, consts, target);

    OptimizeOptions opts;
    opts.seed = mix_seed(seed, stage.name);
    OptimizeResult res;
    try {
        res = optimize(objective, lo, hi, x0, opts);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error("extraction stage '" + stage.name + "' failed: " + e.what());
    }
    if (std::isnan(res.fx))
        throw std::runtime_error("extraction stage '" + stage.name + "' diverged (objective NaN)");

    out.iterations = res.iterations;
    if (res.fx <= out.objective_before) {
        out.params = apply(res.x);
        out.objective_after = res.fx;
    } else {
        out.params = current;  // optimizer found nothing better; keep the input
        out.objective_after = out.objective_before;
    }

    for (size_t i = 0; i < free.size(); ++i) {
        const double span = free[i].hi - free[i].lo;
        const double v = out.params.*free[i].field;
        if (v - free[i].lo < 1e-6 * span || free[i].hi - v < 1e-6 * span)
            out.warnings.push_back(stage.name + ": " + free[i].name + " pinned at bound " +
                                   format_double(v));
    }
    return out;
}

void report_errors(const ModelParams& params, const ModelConstants& consts,
                   const CharacterizationSet& target, double& idvg_pct, double& idvd_pct,
                   double& cv_pct) {
    const DeviceCurve& low = target.find(CurveKind::idvg_low);
    const DeviceCurve& high = target.find(CurveKind::idvg_high);
    idvg_pct = 0.5 * (region_error(model_curve_like(params, consts, low), low) +
                      region_error(model_curve_like(params, consts, high), high));
    double acc = 0.0;
    for (double bias : kIdvdBiases) {
        const DeviceCurve& ref = target.find(CurveKind::idvd, bias);
        acc += region_error(model_curve_like(params, consts, ref), ref);
    }
    idvd_pct = acc / 4.0;
    const DeviceCurve& cv = target.find(CurveKind::cv);
    cv_pct = region_error(model_curve_like(params, consts, cv), cv);
}

ExtractionReport extract(const CharacterizationSet& target, const ParamBounds& bounds,
                         const ModelConstants& consts, std::uint64_t seed) {
    const auto t_start = std::chrono::steady_clock::now();
    target.validate();
    bounds.validate();

    ModelParams params;  // start from the bounds' initial values
    params.polarity = target.polarity;
    for (const auto& [name, b] : bounds.entries) params.*param_field(name) = b.initial;
    validate(params);

    ExtractionReport report;
    for (const auto& stage : standard_stages()) {
        StageOutcome out = run_stage(stage, params, bounds, consts, target, seed);
        params = out.params;
        report.stage_iterations.push_back(out.iterations);
        report.warnings.insert(report.warnings.end(), out.warnings.begin(), out.warnings.end());
    }
    report.fitted = params;
    report_errors(params, consts, target, report.idvg_error_pct, report.idvd_error_pct,
                  report.cv_error_pct);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

}  // namespace mivkit
