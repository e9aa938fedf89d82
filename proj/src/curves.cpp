#include "mivkit/curves.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mivkit/text_util.hpp"

namespace mivkit {

std::string to_string(Variant v) {
    switch (v) {
        case Variant::traditional: return "traditional";
        case Variant::ch1: return "ch1";
        case Variant::ch2: return "ch2";
        case Variant::ch4: return "ch4";
    }
    return "?";
}

Variant variant_from_string(const std::string& s) {
    if (s == "traditional") return Variant::traditional;
    if (s == "ch1") return Variant::ch1;
    if (s == "ch2") return Variant::ch2;
    if (s == "ch4") return Variant::ch4;
    throw std::invalid_argument("unknown variant '" + s + "'");
}

const std::vector<Variant>& all_variants() {
    static const std::vector<Variant> v = {Variant::traditional, Variant::ch1, Variant::ch2,
                                           Variant::ch4};
    return v;
}

std::string to_string(CurveKind k) {
    switch (k) {
        case CurveKind::idvg_low: return "IDVG_LOW";
        case CurveKind::idvg_high: return "IDVG_HIGH";
        case CurveKind::idvd: return "IDVD";
        case CurveKind::cv: return "CV";
    }
    return "?";
}

CurveKind curve_kind_from_string(const std::string& s) {
    if (s == "IDVG_LOW") return CurveKind::idvg_low;
    if (s == "IDVG_HIGH") return CurveKind::idvg_high;
    if (s == "IDVD") return CurveKind::idvd;
    if (s == "CV") return CurveKind::cv;
    throw std::invalid_argument("unknown curve kind '" + s + "'");
}

const DeviceCurve& CharacterizationSet::find(CurveKind kind, double fixed_bias) const {
    for (const auto& c : curves) {
        if (c.kind != kind) continue;
        if (kind == CurveKind::idvd && std::fabs(c.fixed_bias - fixed_bias) > 1e-12) continue;
        return c;
    }
    throw std::runtime_error("characterization set has no " + to_string(kind) + " curve");
}

void CharacterizationSet::validate() const {
    int n_low = 0, n_high = 0, n_cv = 0;
    std::vector<double> idvd_biases;
    for (const auto& c : curves) {
        if (c.polarity != polarity) throw std::runtime_error("curve polarity mismatch within set");
        if (c.samples.size() < 10) throw std::runtime_error(to_string(c.kind) + ": fewer than 10 samples");
        for (size_t i = 0; i < c.samples.size(); ++i) {
            if (!std::isfinite(c.samples[i].sweep_v) || !std::isfinite(c.samples[i].value))
                throw std::runtime_error(to_string(c.kind) + ": non-finite sample");
            if (i > 0 && !(c.samples[i].sweep_v > c.samples[i - 1].sweep_v))
                throw std::runtime_error(to_string(c.kind) + ": sweep values not strictly increasing");
        }
        switch (c.kind) {
            case CurveKind::idvg_low:
                ++n_low;
                if (std::fabs(c.fixed_bias - kIdvgLowVds) > 1e-12)
                    throw std::runtime_error("IDVG_LOW fixed bias must be 0.05 V");
                break;
            case CurveKind::idvg_high:
                ++n_high;
                if (std::fabs(c.fixed_bias - kIdvgHighVds) > 1e-12)
                    throw std::runtime_error("IDVG_HIGH fixed bias must be 1 V");
                break;
            case CurveKind::idvd:
                idvd_biases.push_back(c.fixed_bias);
                break;
            case CurveKind::cv:
                ++n_cv;
                break;
        }
    }
    if (n_low != 1 || n_high != 1 || n_cv != 1 || idvd_biases.size() != 4)
        throw std::runtime_error("set must contain exactly one IDVG_LOW, one IDVG_HIGH, four IDVD and one CV curve");
    std::sort(idvd_biases.begin(), idvd_biases.end());
    for (int i = 0; i < 4; ++i)
        if (std::fabs(idvd_biases[i] - kIdvdBiases[i]) > 1e-12)
            throw std::runtime_error("IDVD biases must be 0.4/0.6/0.8/1.0 V");
}

std::string curves_text(const CharacterizationSet& set) {
    // Canonical order: IDVG_LOW, IDVG_HIGH, IDVD by bias, CV.
    std::vector<const DeviceCurve*> ordered;
    ordered.push_back(&set.find(CurveKind::idvg_low));
    ordered.push_back(&set.find(CurveKind::idvg_high));
    for (double b : kIdvdBiases) ordered.push_back(&set.find(CurveKind::idvd, b));
    ordered.push_back(&set.find(CurveKind::cv));

    std::ostringstream out;
    out << "# miv-cellkit curves v1\n";
    for (const DeviceCurve* c : ordered) {
        out << "CURVE," << to_string(c->kind) << "," << to_string(c->polarity) << ","
            << format_double(c->fixed_bias) << "\n";
        for (const auto& s : c->samples)
            out << format_double(s.sweep_v) << "," << format_double(s.value) << "\n";
    }
    return out.str();
}

void write_curves(const CharacterizationSet& set, const std::string& path) {
    set.validate();
    write_file_atomic(path, curves_text(set));
}

CharacterizationSet parse_curves_text(const std::string& text, const std::string& diag_name) {
    CharacterizationSet set;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw std::runtime_error(diag_name + ":" + std::to_string(lineno) + ": " + msg);
    };
    if (!std::getline(in, line)) fail("empty file");
    ++lineno;
    if (trim(line) != "# miv-cellkit curves v1") fail("bad header, expected '# miv-cellkit curves v1'");

    DeviceCurve* current = nullptr;
    bool polarity_set = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string body = trim(line);
        if (body.empty()) continue;
        std::vector<std::string> fields;
        std::istringstream ls(body);
        std::string tok;
        while (std::getline(ls, tok, ',')) fields.push_back(trim(tok));
        if (fields.size() >= 1 && fields[0] == "CURVE") {
            if (fields.size() != 4) fail("CURVE line needs kind, polarity and fixed bias");
            DeviceCurve c;
            try {
                c.kind = curve_kind_from_string(fields[1]);
                c.polarity = polarity_from_string(fields[2]);
            } catch (const std::invalid_argument& e) {
                fail(e.what());
            }
            c.fixed_bias = parse_number(fields[3], fail);
            if (!polarity_set) {
                set.polarity = c.polarity;
                polarity_set = true;
            } else if (c.polarity != set.polarity) {
                fail("curve polarity differs from the rest of the file");
            }
            set.curves.push_back(std::move(c));
            current = &set.curves.back();
            continue;
        }
        if (!current) fail("sample line before any CURVE header");
        if (fields.size() != 2) fail("expected '<sweep_V>,<value>'");
        CurveSample s;
        s.sweep_v = parse_number(fields[0], fail);
        s.value = parse_number(fields[1], fail);
        if (!current->samples.empty() && !(s.sweep_v > current->samples.back().sweep_v)) {
            fail(current->samples.back().sweep_v == s.sweep_v ? "duplicate sweep point"
                                                              : "sweep values must increase");
        }
        current->samples.push_back(s);
    }
    set.validate();
    return set;
}

CharacterizationSet read_curves(const std::string& path) {
    return parse_curves_text(read_file(path), path);
}

namespace {

constexpr double kSubthresholdAmps = 1e-6;

double branch_error(const std::vector<double>& ym, const std::vector<double>& yr) {
    double maxref = 0.0;
    for (double v : yr) maxref = std::max(maxref, std::fabs(v));
    const double floor = 1e-3 * maxref;
    double acc = 0.0;
    for (size_t i = 0; i < yr.size(); ++i)
        acc += std::fabs(ym[i] - yr[i]) / std::max(std::fabs(yr[i]), floor);
    return 100.0 * acc / static_cast<double>(yr.size());
}

double log10_clamped(double v) { return std::log10(std::max(std::fabs(v), 1e-15)); }

}  // namespace

double region_error(const DeviceCurve& model, const DeviceCurve& reference) {
    if (model.samples.size() != reference.samples.size())
        throw std::runtime_error("region_error: sweep grids differ in length");
    for (size_t i = 0; i < model.samples.size(); ++i)
        if (std::fabs(model.samples[i].sweep_v - reference.samples[i].sweep_v) > 1e-12)
            throw std::runtime_error("region_error: sweep grids differ");

    const bool idvg = reference.kind == CurveKind::idvg_low || reference.kind == CurveKind::idvg_high;
    std::vector<double> lin_m, lin_r, log_m, log_r;
    for (size_t i = 0; i < reference.samples.size(); ++i) {
        const double r = reference.samples[i].value;
        const double m = model.samples[i].value;
        if (idvg && std::fabs(r) < kSubthresholdAmps) {
            log_m.push_back(log10_clamped(m));
            log_r.push_back(log10_clamped(r));
        } else {
            lin_m.push_back(m);
            lin_r.push_back(r);
        }
    }
    if (log_r.empty()) return branch_error(lin_m, lin_r);
    if (lin_r.empty()) return branch_error(log_m, log_r);
    return 0.5 * (branch_error(lin_m, lin_r) + branch_error(log_m, log_r));
}

namespace {

std::vector<double> grid(double lo, int count, double step) {
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) g[i] = lo + i * step;
    return g;
}

double eval_current_mag(const ModelParams& p, const ModelConstants& c, double vgs_mag, double vds_mag) {
    // Curves store source-referenced magnitudes; for p the native bias is the
    // mirrored one, and the mirrored current is exactly the n-core value.
    BiasPoint b;
    if (p.polarity == Polarity::p) {
        b.vgs = -vgs_mag;
        b.vds = -vds_mag;
        return -drain_current(p, c, b);
    }
    b.vgs = vgs_mag;
    b.vds = vds_mag;
    return drain_current(p, c, b);
}

double eval_cv_mag(const ModelParams& p, const ModelConstants& c, double vg_mag) {
    return gate_capacitance(p, c, p.polarity == Polarity::p ? -vg_mag : vg_mag);
}

}  // namespace

DeviceCurve model_curve_like(const ModelParams& params, const ModelConstants& consts,
                             const DeviceCurve& target) {
    DeviceCurve out = target;
    out.polarity = params.polarity;
    for (auto& s : out.samples) {
        switch (target.kind) {
            case CurveKind::idvg_low:
            case CurveKind::idvg_high:
                s.value = eval_current_mag(params, consts, s.sweep_v, target.fixed_bias);
                break;
            case CurveKind::idvd:
                s.value = eval_current_mag(params, consts, target.fixed_bias, s.sweep_v);
                break;
            case CurveKind::cv:
                s.value = eval_cv_mag(params, consts, s.sweep_v);
                break;
        }
    }
    return out;
}

CharacterizationSet model_curves(const ModelParams& params, const ModelConstants& consts,
                                 Variant variant) {
    CharacterizationSet set;
    set.variant = variant;
    set.polarity = params.polarity;

    auto make = [&](CurveKind kind, double fixed_bias, const std::vector<double>& sweep) {
        DeviceCurve c;
        c.kind = kind;
        c.fixed_bias = fixed_bias;
        c.polarity = params.polarity;
        c.samples.resize(sweep.size());
        for (size_t i = 0; i < sweep.size(); ++i) c.samples[i].sweep_v = sweep[i];
        set.curves.push_back(std::move(c));
        set.curves.back() = model_curve_like(params, consts, set.curves.back());
    };

    const auto vg = grid(0.0, 41, 0.025);
    const auto vd = grid(0.0, 41, 0.025);
    const auto vcv = grid(-0.5, 61, 0.025);
    make(CurveKind::idvg_low, kIdvgLowVds, vg);
    make(CurveKind::idvg_high, kIdvgHighVds, vg);
    for (double b : kIdvdBiases) make(CurveKind::idvd, b, vd);
    make(CurveKind::cv, 0.0, vcv);
    return set;
}

double GaussianRng::uniform01() {
    // 53-bit mantissa from the pinned engine stream; in (0,1) after offset.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianRng::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

std::uint64_t mix_seed(std::uint64_t seed, const std::string& label) {
    std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
    for (unsigned char ch : label) {
        h ^= ch;
        h *= 0x100000001b3ULL;
        h ^= h >> 29;
    }
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 32;
    return h;
}

CharacterizationSet generate_synthetic(const ModelParams& true_params, const ModelConstants& consts,
                                       Variant variant, double noise_rel, std::uint64_t seed) {
    if (!(noise_rel >= 0.0 && noise_rel <= 0.1))
        throw std::invalid_argument("noise_rel must be within [0, 0.1]");
    CharacterizationSet set = model_curves(true_params, consts, variant);
    if (noise_rel > 0.0) {
        for (auto& curve : set.curves) {
            GaussianRng rng(mix_seed(seed, to_string(variant) + "/" + to_string(set.polarity) + "/" +
                                               to_string(curve.kind) + "/" +
                                               format_double(curve.fixed_bias)));
            for (auto& s : curve.samples) s.value *= 1.0 + noise_rel * rng.next();
        }
    }
    return set;
}

}  // namespace mivkit
