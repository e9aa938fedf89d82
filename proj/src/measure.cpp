#include "mivkit/measure.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace mivkit {

std::vector<double> crossings(const std::vector<double>& time, const std::vector<double>& wave,
                              double level) {
    std::vector<double> out;
    for (size_t i = 1; i < wave.size(); ++i) {
        const double a = wave[i - 1] - level;
        const double b = wave[i] - level;
        if (a == 0.0 && b == 0.0) continue;
        if ((a <= 0.0 && b > 0.0) || (a >= 0.0 && b < 0.0)) {
            const double frac = a / (a - b);
            out.push_back(time[i - 1] + frac * (time[i] - time[i - 1]));
        }
    }
    return out;
}

Measurement measure(const TransientResult& result, const std::string& in_node,
                    const std::string& out_node, double vdd) {
    const auto& vin = result.voltage(in_node);
    const auto& vout = result.voltage(out_node);
    const double level = 0.5 * vdd;

    const std::vector<double> in_cross = crossings(result.time, vin, level);
    const std::vector<double> out_cross = crossings(result.time, vout, level);
    if (in_cross.empty() || out_cross.empty())
        throw MeasurementError("no 50% crossing on " + (in_cross.empty() ? in_node : out_node));

    Measurement m;
    double sum_lh = 0.0, sum_hl = 0.0, sum_all = 0.0;
    int n_lh = 0, n_hl = 0;
    for (double tin : in_cross) {
        auto it = std::upper_bound(out_cross.begin(), out_cross.end(), tin);
        if (it == out_cross.end()) continue;
        const double tout = *it;
        const double delay = tout - tin;
        // classify by output direction at the crossing
        size_t idx = 0;
        while (idx + 1 < result.time.size() && result.time[idx + 1] < tout) ++idx;
        const bool rising = vout[std::min(idx + 1, vout.size() - 1)] > vout[idx];
        (rising ? sum_lh : sum_hl) += delay;
        (rising ? n_lh : n_hl) += 1;
        sum_all += delay;
        ++m.arcs;
    }
    if (m.arcs == 0) throw MeasurementError("no output crossing follows any input edge");
    m.t_plh = n_lh ? sum_lh / n_lh : 0.0;
    m.t_phl = n_hl ? sum_hl / n_hl : 0.0;
    m.avg_delay = sum_all / m.arcs;

    // supply: the source named like vdd, else the first one
    size_t supply = 0;
    for (size_t i = 0; i < result.source_names.size(); ++i) {
        std::string lower = result.source_names[i];
        std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
        if (lower.find("vdd") != std::string::npos) {
            supply = i;
            break;
        }
    }
    const auto& isup = result.source_i[supply];
    double energy = 0.0;
    for (size_t i = 1; i < result.time.size(); ++i)
        energy += 0.5 * (isup[i] + isup[i - 1]) * (result.time[i] - result.time[i - 1]);
    const double window = result.time.back() - result.time.front();
    m.avg_power = vdd * energy / window;
    return m;
}

}  // namespace mivkit
