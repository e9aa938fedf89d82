#pragma once

#include <string>

#include "mivkit/simulator.hpp"

namespace mivkit {

struct MeasurementError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Measurement {
    double t_plh = 0.0;       // mean rising-output delay, s
    double t_phl = 0.0;       // mean falling-output delay, s
    double avg_delay = 0.0;   // mean over all arcs, s
    double avg_power = 0.0;   // window-average supply power, W
    int arcs = 0;
};

// 50%-of-vdd crossing times with linear interpolation between samples.
std::vector<double> crossings(const std::vector<double>& time, const std::vector<double>& wave,
                              double level);

// Pairs each input crossing with the next output crossing and averages the
// arc delays; power integrates vdd * delivered supply current over the full
// window. The supply source is found by name (case-insensitive "vdd"),
// falling back to the first source. Throws MeasurementError when either
// waveform never crosses 50% of vdd.
Measurement measure(const TransientResult& result, const std::string& in_node,
                    const std::string& out_node, double vdd);

}  // namespace mivkit
