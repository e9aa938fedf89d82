#include "mivkit/device_model.hpp"

#include <cmath>
#include <stdexcept>

#include "mivkit/dual.hpp"

namespace mivkit {

std::string to_string(Polarity p) { return p == Polarity::n ? "n" : "p"; }

Polarity polarity_from_string(const std::string& s) {
    if (s == "n" || s == "N") return Polarity::n;
    if (s == "p" || s == "P") return Polarity::p;
    throw std::invalid_argument("unknown polarity '" + s + "' (expected n or p)");
}

void validate(const ModelConstants& c) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw std::invalid_argument(std::string("model constant ") + name + " must be > 0");
    };
    positive(c.tsi, "TSI");
    positive(c.tox, "TOX");
    positive(c.tbox, "TBOX");
    positive(c.l, "L");
    positive(c.w, "W");
    if (c.igcmod != 0) throw std::invalid_argument("IGCMOD must be 0 (gate current is not modeled)");
}

void validate(const ModelParams& p) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("model parameter violation: ") + what);
    };
    require(std::isfinite(p.vth0) && std::isfinite(p.delvt) && std::isfinite(p.etab) &&
                std::isfinite(p.ua) && std::isfinite(p.ub) && std::isfinite(p.ud) &&
                std::isfinite(p.cdsc) && std::isfinite(p.cdscd) && std::isfinite(p.dvt0) &&
                std::isfinite(p.dvt1) && std::isfinite(p.pvag),
            "all parameters finite");
    require(p.u0 > 0.0, "U0 > 0");
    require(p.vsat > 0.0, "VSAT > 0");
    require(p.ckappa > 0.0, "CKAPPA > 0");
    require(p.moin > 0.0, "MOIN > 0");
    require(p.ucs >= 0.0, "UCS >= 0");
    require(p.cf >= 0.0 && p.cgso >= 0.0 && p.cgdo >= 0.0 && p.cgsl >= 0.0 && p.cgdl >= 0.0,
            "capacitance coefficients >= 0");
    // slope factor n = 1 + cdsc + cdscd*vds must stay >= 1 on vds in [0,1]
    require(1.0 + p.cdsc + std::min(0.0, p.cdscd) >= 1.0, "slope factor n >= 1 over vds in [0,1]");
}

namespace {

using std::exp;
using std::log1p;
using std::pow;

template <typename T>
T softplus(T x) {
    if (value_of(x) > 0.0) return x + log1p(exp(-x));
    return log1p(exp(x));
}

// s*softplus(x/s): smooth max(x, 0) with sharpness s.
template <typename T>
T softplus_s(T x, double s) {
    return T(s) * softplus(x / T(s));
}

// -s*log(exp(-a/s) + exp(-b/s)): smooth min, written in overflow-safe form.
template <typename T>
T smoothmin(T a, T b, double s) {
    if (value_of(a) <= value_of(b)) return a - softplus_s(a - b, s);
    return b - softplus_s(b - a, s);
}

template <typename T>
T logistic(T x) {
    if (value_of(x) >= 0.0) return T(1.0) / (T(1.0) + exp(-x));
    T e = exp(x);
    return e / (T(1.0) + e);
}

// n-type core current for vds >= 0. T is double or Dual (partials seeded on
// vgs and vds by the caller).
template <typename T>
T core_current(const ModelParams& p, const ModelConstants& c, T vgs, T vds) {
    const T n = T(1.0 + p.cdsc) + T(p.cdscd) * vds;  // validated >= 1 on the domain
    const T vth = T(p.vth0 - p.dvt0 * std::exp(-p.dvt1 * c.l / kLt) * kVbi) - T(std::fabs(p.etab)) * vds;
    const T nphit = n * T(kPhiT);
    const T uf = (vgs - vth) / nphit;
    const T ur = (vgs - vth - n * vds) / nphit;
    const T vgsteff = nphit * softplus(uf);

    const T e = vgsteff;  // normalized by 1 V
    const T mu_eff = T(p.u0) / (T(1.0) + T(p.ua) * e + T(p.ub) * e * e + T(p.ud) * pow(e + T(1e-30), p.ucs));

    const T i_f = softplus(uf * T(0.5)) * softplus(uf * T(0.5));
    const T i_r = softplus(ur * T(0.5)) * softplus(ur * T(0.5));
    const T i0 = T(2.0) * n * mu_eff * T(kEpsOx / c.tox) * T(c.w / c.l) * T(kPhiT * kPhiT) * (i_f - i_r);

    // Velocity saturation. The denominator cap sits at the BSIM-style
    // saturation voltage EsatL*Vgsteff/(EsatL+Vgsteff); capping at Vgsteff
    // itself makes Id non-monotone in vds near saturation.
    const T esat_l = T(2.0 * p.vsat * c.l) / mu_eff;
    const T vdsat = esat_l * vgsteff / (esat_l + vgsteff);
    const T denom = T(1.0) + smoothmin(vds, vdsat, kSmoothV) / esat_l;

    // Saturation-slope (channel length modulation style) term.
    const T slope = T(1.0) + T(p.pvag) * vgsteff * softplus_s(vds - vdsat, kSmoothV);

    return i0 / denom * slope;
}

// Handles polarity mirroring and source/drain exchange so any (vgs, vds)
// quadrant evaluates through the vds >= 0 core. C1 at the seams because
// dId/dVgs vanishes identically at vds = 0.
template <typename T>
T device_current(const ModelParams& p, const ModelConstants& c, T vgs, T vds) {
    if (p.polarity == Polarity::p) {
        vgs = -vgs;
        vds = -vds;
    }
    T id;
    if (value_of(vds) >= 0.0) {
        id = core_current(p, c, vgs, vds);
    } else {
        id = -core_current(p, c, vgs - vds, -vds);
    }
    return p.polarity == Polarity::p ? -id : id;
}

void check_bias(const BiasPoint& bias) {
    if (!std::isfinite(bias.vgs) || !std::isfinite(bias.vds) || !std::isfinite(bias.vsb))
        throw std::domain_error("bias voltages must be finite");
    if (bias.vsb != 0.0) throw std::domain_error("vsb must be 0 (no back-gate sweep)");
}

}  // namespace

double drain_current(const ModelParams& p, const ModelConstants& c, const BiasPoint& bias) {
    check_bias(bias);
    validate(p);
    return device_current(p, c, bias.vgs, bias.vds);
}

double source_current(const ModelParams& p, const ModelConstants& c, const BiasPoint& bias) {
    return -drain_current(p, c, bias);
}

Conductances conductances(const ModelParams& p, const ModelConstants& c, const BiasPoint& bias) {
    check_bias(bias);
    validate(p);
    Dual vgs(bias.vgs, 1.0, 0.0);
    Dual vds(bias.vds, 0.0, 1.0);
    Dual id = device_current(p, c, vgs, vds);
    return {id.d0, id.d1};
}

namespace {

// Cg(vg) for the n core; p mirrors the voltage axis before calling this.
double core_capacitance(const ModelParams& p, const ModelConstants& c, double vg) {
    const double cox_area = c.w * c.l * kEpsOx / c.tox;
    const double inv = 1.0 / (1.0 + std::exp(-(vg - p.vth0 - p.delvt) / (p.moin * kPhiT)));
    const double low = 1.0 / (1.0 + std::exp(vg / p.ckappa));  // = 1 - logistic(vg/ckappa)
    return cox_area * inv + c.w * (p.cgso + p.cgdo) + p.cf + c.w * (p.cgsl + p.cgdl) * low;
}

double softplus_d(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// Closed-form integral of core_capacitance from 0 to vg.
double core_charge(const ModelParams& p, const ModelConstants& c, double vg) {
    const double cox_area = c.w * c.l * kEpsOx / c.tox;
    const double s = p.moin * kPhiT;
    const double a = p.vth0 + p.delvt;
    const double intrinsic = cox_area * s * (softplus_d((vg - a) / s) - softplus_d(-a / s));
    const double overlap = (c.w * (p.cgso + p.cgdo) + p.cf) * vg;
    const double low = c.w * (p.cgsl + p.cgdl) * p.ckappa *
                       (std::log(2.0) - softplus_d(-vg / p.ckappa));
    return intrinsic + overlap + low;
}

}  // namespace

double gate_capacitance(const ModelParams& p, const ModelConstants& c, double vg) {
    if (!std::isfinite(vg)) throw std::domain_error("gate voltage must be finite");
    validate(p);
    return core_capacitance(p, c, p.polarity == Polarity::p ? -vg : vg);
}

double gate_charge(const ModelParams& p, const ModelConstants& c, double vg) {
    if (!std::isfinite(vg)) throw std::domain_error("gate voltage must be finite");
    validate(p);
    if (p.polarity == Polarity::p) return -core_charge(p, c, -vg);
    return core_charge(p, c, vg);
}

}  // namespace mivkit
