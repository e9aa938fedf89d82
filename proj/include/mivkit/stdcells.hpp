#pragma once

#include <string>
#include <vector>

#include "mivkit/curves.hpp"
#include "mivkit/netlist.hpp"

namespace mivkit {

// Series/parallel pull-down network expression over signal indices; the
// pull-up network is the structural dual. Internal inverter stages provide
// complemented signals for the XOR/XNOR/MUX topologies.
struct NetExpr {
    enum class Kind { leaf, series, parallel };
    Kind kind = Kind::leaf;
    int signal = -1;
    std::vector<NetExpr> children;

    static NetExpr leaf(int signal) { return {Kind::leaf, signal, {}}; }
    static NetExpr series(std::vector<NetExpr> ch) { return {Kind::series, -1, std::move(ch)}; }
    static NetExpr parallel(std::vector<NetExpr> ch) { return {Kind::parallel, -1, std::move(ch)}; }
    int device_count() const;
};

struct CellStage {
    NetExpr pdn;
    int out_signal;  // index into CellSpec::signals
};

// Static CMOS cell: signals 0..inputs-1 are the pins, later entries are
// internal stage outputs; the last stage drives the cell output.
struct CellSpec {
    std::string name;
    std::vector<std::string> inputs;
    std::vector<std::string> signals;
    std::vector<CellStage> stages;
    int output_signal = -1;

    int transistors_per_side() const;  // pull-up count == pull-down count
    bool eval(const std::vector<bool>& input_values) const;
};

// The 14-cell library.
const std::vector<CellSpec>& cell_library();
const CellSpec& cell_by_name(const std::string& name);

// Routing parasitics and output load.
struct ParasiticPolicy {
    double r_miv = 7.0;           // per net crossing layers
    double r_interconnect = 3.0;  // one per device-driven or pin net
    double r_rail = 5.0;          // vdd and ground leads
    double c_load = 1e-15;        // output to ground
};

// Nodes of interest in a built cell netlist.
struct CellNetlist {
    Netlist netlist;
    std::vector<std::string> input_nodes;  // bottom-layer hubs, one per pin
    std::string output_node;               // bottom-layer output hub
    int miv_count = 0;                     // number of 7-ohm elements inserted
};

// Builds the two-layer netlist: n devices (top) use the variant's params, p
// devices (bottom) always use the traditional fit. Every net joining the two
// layers carries one MIV resistor; each driven net carries one interconnect
// resistor next to its driver; rails carry the lead resistance; the output
// carries the load capacitor.
CellNetlist build_cell_netlist(const CellSpec& spec, const ModelParams& params_n,
                               const ModelParams& params_p, const ModelConstants& consts,
                               const ParasiticPolicy& policy, double vdd = kVdd);

// One transition pair on one pin: the other pins hold values under which the
// pin controls the output.
struct StimulusArc {
    int pin = 0;
    std::vector<bool> others;     // values for all pins; entry `pin` unused
    bool output_rises_with_pin = false;
};

// For every pin: a rising and a falling 10 ps edge (one simulation window per
// pin, edges at 1 ns and 3 ns of a 4 ns window).
std::vector<StimulusArc> stimulus_plan(const CellSpec& spec);

inline constexpr double kEdgeSeconds = 10e-12;
inline constexpr double kWindowSeconds = 4e-9;
inline constexpr double kFirstEdgeAt = 1e-9;
inline constexpr double kSecondEdgeAt = 3e-9;

// Install PWL/DC input sources for one arc into a built cell netlist.
void apply_stimulus(CellNetlist& cell, const StimulusArc& arc, double vdd = kVdd);

}  // namespace mivkit
