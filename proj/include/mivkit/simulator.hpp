#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mivkit/netlist.hpp"

namespace mivkit {

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DcResult {
    std::vector<double> node_v;    // indexed like Netlist::node_names, [0] = 0
    std::vector<double> source_i;  // delivered current out of each + terminal, A
    int iterations = 0;
};

// Newton iteration on the MNA equations with analytic transistor stamps.
// Converges when max |dV| < 1e-6 V and max KCL residual < 1e-9 A within 100
// iterations; falls back to gmin stepping (1e-3 .. 1e-12 S in decades) and
// then source stepping (10 ramp steps) before giving up.
DcResult dc_operating_point(const Netlist& nl, double time = 0.0);

struct TransientResult {
    std::vector<std::string> node_names;
    std::vector<std::string> source_names;
    std::vector<double> time;
    std::vector<std::vector<double>> node_v;    // [node][step]
    std::vector<std::vector<double>> source_i;  // [source][step], delivered

    // |integral of the KCL-at-ground current| relative to the exchanged
    // charge; the global conservation diagnostic.
    double charge_residual_rel = 0.0;

    const std::vector<double>& voltage(const std::string& node) const;
    const std::vector<double>& delivered_current(const std::string& source) const;
};

// Fixed-step trapezoidal integration (first step backward Euler). Nonlinear
// transistor gate charge is handled by the charge companion model; a step
// that fails Newton is retried at dt/2 and dt/4 before raising.
TransientResult transient(const Netlist& nl, double t_stop, double dt);

}  // namespace mivkit
