#pragma once

#include <string>

namespace mivkit {

enum class Polarity { n, p };

std::string to_string(Polarity p);
Polarity polarity_from_string(const std::string& s);

// Process constants and model-selector flags. Everything here is fixed per
// device; the flags are metadata and do not switch equation sets, except
// igcmod which must be 0 (no gate-channel tunneling current is modeled).
struct ModelConstants {
    double tsi = 7e-9;     // silicon film thickness, m
    double tox = 1e-9;     // gate oxide thickness, m
    double tbox = 100e-9;  // buried oxide thickness, m
    double l = 48e-9;      // channel length, m
    double w = 192e-9;     // channel width, m
    double tnom = 25.0;    // nominal temperature, degC
    int level = 70;
    int mobmod = 4;
    int capmod = 3;
    int igcmod = 0;
    int soimod = 2;
};

// Fitted parameter vector for one device variant/polarity. Units follow the
// reduced-order equations: cdsc/cdscd enter the slope factor directly and
// etab is a V/V drain-induced threshold shift (see README for the
// reinterpretation relative to the usual level-70 units).
struct ModelParams {
    double vth0 = 0.35;   // V
    double delvt = 0.0;   // V, capacitance-curve threshold adjust
    double u0 = 0.03;     // m^2/(V s)
    double ua = 0.2;
    double ub = 0.05;
    double ud = 0.02;
    double ucs = 1.5;
    double cdsc = 0.05;
    double cdscd = 0.03;
    double dvt0 = 0.5;
    double dvt1 = 0.5;
    double etab = 0.05;   // V/V
    double vsat = 1e5;    // m/s
    double pvag = 0.1;    // 1/V
    double ckappa = 0.5;  // V
    double cf = 2e-17;    // F
    double cgso = 1e-10;  // F/m
    double cgdo = 1e-10;  // F/m
    double cgsl = 5e-11;  // F/m
    double cgdl = 5e-11;  // F/m
    double moin = 5.0;
    Polarity polarity = Polarity::n;
};

struct BiasPoint {
    double vgs = 0.0;
    double vds = 0.0;
    double vsb = 0.0;  // no back-gate sweep; must stay 0
};

struct Conductances {
    double gm = 0.0;   // dId/dVgs, S
    double gds = 0.0;  // dId/dVds, S
};

// Fixed internal constants of the equation set.
inline constexpr double kPhiT = 0.025852;     // thermal voltage at 25 degC, V
inline constexpr double kEpsOx = 3.453e-11;   // oxide permittivity, F/m
inline constexpr double kLt = 20e-9;          // short-channel length scale, m
inline constexpr double kVbi = 0.8;           // built-in potential, V
inline constexpr double kSmoothV = 0.01;      // C1 smoothing sharpness, V

// Throws std::invalid_argument naming the offending field.
void validate(const ModelParams& p);
void validate(const ModelConstants& c);

// Drain current, sign convention current into the drain terminal.
// Smooth (C1) in vgs and vds; Id(vds=0) = 0 exactly; p-polarity is the
// voltage mirror of the n core. Biases with vds < 0 are handled by
// source/drain exchange, so the function is usable at any operating point.
double drain_current(const ModelParams& p, const ModelConstants& c, const BiasPoint& bias);

// Is = -Id exactly (igcmod = 0, no gate current).
double source_current(const ModelParams& p, const ModelConstants& c, const BiasPoint& bias);

// Total gate capacitance vs gate voltage (source grounded), F. Positive for
// all vg; p-polarity mirrors the voltage axis.
double gate_capacitance(const ModelParams& p, const ModelConstants& c, double vg);

// Gate charge Q(vg) = integral of Cg from 0 to vg, closed form, C.
// dQ/dvg == gate_capacitance identically.
double gate_charge(const ModelParams& p, const ModelConstants& c, double vg);

// Analytic dId/dVgs and dId/dVds (forward-mode duals through the same
// expression drain_current evaluates).
Conductances conductances(const ModelParams& p, const ModelConstants& c, const BiasPoint& bias);

}  // namespace mivkit
