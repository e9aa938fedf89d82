#include "mivkit/stdcells.hpp"

#include <stdexcept>

namespace mivkit {

int NetExpr::device_count() const {
    if (kind == Kind::leaf) return 1;
    int n = 0;
    for (const auto& c : children) n += c.device_count();
    return n;
}

int CellSpec::transistors_per_side() const {
    int n = 0;
    for (const auto& s : stages) n += s.pdn.device_count();
    return n;
}

namespace {

bool pdn_conducts(const NetExpr& e, const std::vector<bool>& values) {
    switch (e.kind) {
        case NetExpr::Kind::leaf:
            return values[static_cast<size_t>(e.signal)];
        case NetExpr::Kind::series:
            for (const auto& c : e.children)
                if (!pdn_conducts(c, values)) return false;
            return true;
        case NetExpr::Kind::parallel:
            for (const auto& c : e.children)
                if (pdn_conducts(c, values)) return true;
            return false;
    }
    return false;
}

}  // namespace

bool CellSpec::eval(const std::vector<bool>& input_values) const {
    if (input_values.size() != inputs.size())
        throw std::invalid_argument(name + ": wrong input count");
    std::vector<bool> values(signals.size(), false);
    for (size_t i = 0; i < inputs.size(); ++i) values[i] = input_values[i];
    for (const auto& stage : stages)
        values[static_cast<size_t>(stage.out_signal)] = !pdn_conducts(stage.pdn, values);
    return values[static_cast<size_t>(output_signal)];
}

namespace {

using E = NetExpr;

CellSpec make_cell(std::string name, std::vector<std::string> inputs,
                   std::vector<std::string> extra_signals, std::vector<CellStage> stages) {
    CellSpec spec;
    spec.name = std::move(name);
    spec.inputs = inputs;
    spec.signals = std::move(inputs);
    for (auto& s : extra_signals) spec.signals.push_back(std::move(s));
    spec.stages = std::move(stages);
    spec.output_signal = static_cast<int>(spec.signals.size()) - 1;
    return spec;
}

std::vector<CellSpec> build_library() {
    std::vector<CellSpec> lib;

    // single-stage inverting gates
    lib.push_back(make_cell("INV1X1", {"A"}, {"Y"}, {{E::leaf(0), 1}}));
    lib.push_back(make_cell("NAND2X1", {"A", "B"}, {"Y"}, {{E::series({E::leaf(0), E::leaf(1)}), 2}}));
    lib.push_back(make_cell("NAND3X1", {"A", "B", "C"}, {"Y"},
                            {{E::series({E::leaf(0), E::leaf(1), E::leaf(2)}), 3}}));
    lib.push_back(make_cell("NOR2X1", {"A", "B"}, {"Y"}, {{E::parallel({E::leaf(0), E::leaf(1)}), 2}}));
    lib.push_back(make_cell("NOR3X1", {"A", "B", "C"}, {"Y"},
                            {{E::parallel({E::leaf(0), E::leaf(1), E::leaf(2)}), 3}}));

    // and-or-invert / or-and-invert (2-1 forms)
    lib.push_back(make_cell("AOI2X1", {"A", "B", "C"}, {"Y"},
                            {{E::parallel({E::series({E::leaf(0), E::leaf(1)}), E::leaf(2)}), 3}}));
    lib.push_back(make_cell("OAI2X1", {"A", "B", "C"}, {"Y"},
                            {{E::series({E::parallel({E::leaf(0), E::leaf(1)}), E::leaf(2)}), 3}}));

    // buffered compound gates: NAND/NOR followed by an inverter
    lib.push_back(make_cell("AND2X1", {"A", "B"}, {"n1", "Y"},
                            {{E::series({E::leaf(0), E::leaf(1)}), 2}, {E::leaf(2), 3}}));
    lib.push_back(make_cell("AND3X1", {"A", "B", "C"}, {"n1", "Y"},
                            {{E::series({E::leaf(0), E::leaf(1), E::leaf(2)}), 3}, {E::leaf(3), 4}}));
    lib.push_back(make_cell("OR2X1", {"A", "B"}, {"n1", "Y"},
                            {{E::parallel({E::leaf(0), E::leaf(1)}), 2}, {E::leaf(2), 3}}));
    lib.push_back(make_cell("OR3X1", {"A", "B", "C"}, {"n1", "Y"},
                            {{E::parallel({E::leaf(0), E::leaf(1), E::leaf(2)}), 3}, {E::leaf(3), 4}}));

    // xor family as complement-generating inverters plus one AOI stage
    lib.push_back(make_cell("XOR2X1", {"A", "B"}, {"an", "bn", "Y"},
                            {{E::leaf(0), 2},
                             {E::leaf(1), 3},
                             {E::parallel({E::series({E::leaf(0), E::leaf(1)}),
                                           E::series({E::leaf(2), E::leaf(3)})}),
                              4}}));
    lib.push_back(make_cell("XNOR2X1", {"A", "B"}, {"an", "bn", "Y"},
                            {{E::leaf(0), 2},
                             {E::leaf(1), 3},
                             {E::parallel({E::series({E::leaf(0), E::leaf(3)}),
                                           E::series({E::leaf(2), E::leaf(1)})}),
                              4}}));

    // 2:1 mux, AOI form: Y = NOT(S*An + Sn*Bn) = S*A + Sn*B
    lib.push_back(make_cell("MUX2X1", {"A", "B", "S"}, {"an", "bn", "sn", "Y"},
                            {{E::leaf(0), 3},
                             {E::leaf(1), 4},
                             {E::leaf(2), 5},
                             {E::parallel({E::series({E::leaf(2), E::leaf(3)}),
                                           E::series({E::leaf(5), E::leaf(4)})}),
                              6}}));

    return lib;
}

}  // namespace

const std::vector<CellSpec>& cell_library() {
    static const std::vector<CellSpec> lib = build_library();
    return lib;
}

const CellSpec& cell_by_name(const std::string& name) {
    for (const auto& c : cell_library())
        if (c.name == name) return c;
    throw std::invalid_argument("unknown cell '" + name + "'");
}

namespace {

// Per-signal circuit nodes. Bottom hub is the pin/routing side; nets that
// reach the other layer get a top hub behind the MIV resistor.
struct SignalNodes {
    int hub_bottom = -1;
    int hub_top = -1;
};

struct Builder {
    Netlist& nl;
    const ParasiticPolicy& policy;
    int vdd_rail;
    int gnd_rail;
    int& miv_count;
    int seq = 0;

    int fresh(const std::string& base) { return nl.add_node(base + std::to_string(seq++)); }
};

// Pull-down (n, top layer): conduction path between `hi` (stage output) and
// `lo` (ground rail); series children stack through fresh internal nodes.
void build_n(Builder& b, const NetExpr& e, int hi, int lo, const std::vector<SignalNodes>& sig,
             const ModelParams& params, const ModelConstants& consts) {
    switch (e.kind) {
        case NetExpr::Kind::leaf:
            b.nl.add_transistor("Mn" + std::to_string(b.seq++), hi,
                                sig[static_cast<size_t>(e.signal)].hub_top, lo, params, consts);
            break;
        case NetExpr::Kind::series: {
            int top = hi;
            for (size_t i = 0; i < e.children.size(); ++i) {
                const int bottom =
                    i + 1 == e.children.size() ? lo : b.fresh("nstack");
                build_n(b, e.children[i], top, bottom, sig, params, consts);
                top = bottom;
            }
            break;
        }
        case NetExpr::Kind::parallel:
            for (const auto& c : e.children) build_n(b, c, hi, lo, sig, params, consts);
            break;
    }
}

// Pull-up (p, bottom layer): the structural dual, between `hi` (vdd rail)
// and `lo` (stage drive node); series<->parallel swapped relative to the pdn.
void build_p(Builder& b, const NetExpr& e, int hi, int lo, const std::vector<SignalNodes>& sig,
             const ModelParams& params, const ModelConstants& consts) {
    switch (e.kind) {
        case NetExpr::Kind::leaf:
            b.nl.add_transistor("Mp" + std::to_string(b.seq++), lo,
                                sig[static_cast<size_t>(e.signal)].hub_bottom, hi, params, consts);
            break;
        case NetExpr::Kind::series: {  // dual: parallel arrangement of children
            for (const auto& c : e.children) build_p(b, c, hi, lo, sig, params, consts);
            break;
        }
        case NetExpr::Kind::parallel: {  // dual: series chain
            int top = hi;
            for (size_t i = 0; i < e.children.size(); ++i) {
                const int bottom = i + 1 == e.children.size() ? lo : b.fresh("pstack");
                build_p(b, e.children[i], top, bottom, sig, params, consts);
                top = bottom;
            }
            break;
        }
    }
}

}  // namespace

CellNetlist build_cell_netlist(const CellSpec& spec, const ModelParams& params_n,
                               const ModelParams& params_p, const ModelConstants& consts,
                               const ParasiticPolicy& policy, double vdd) {
    if (params_n.polarity != Polarity::n || params_p.polarity != Polarity::p)
        throw std::invalid_argument("build_cell_netlist: parameter polarities are swapped");

    CellNetlist cell;
    Netlist& nl = cell.netlist;
    const int vddsrc = nl.add_node("vddsrc");
    const int vdd_rail = nl.add_node("vdd");
    const int gnd_rail = nl.add_node("gndrail");
    nl.add_dc_source("Vvdd", vddsrc, 0, vdd);
    nl.add_resistor("Rvdd", vddsrc, vdd_rail, policy.r_rail);
    nl.add_resistor("Rgnd", gnd_rail, 0, policy.r_rail);

    Builder b{nl, policy, vdd_rail, gnd_rail, cell.miv_count};

    // every signal crosses layers: p gates / p drains below, n gates /
    // n drains above, one MIV between the hubs
    std::vector<SignalNodes> sig(spec.signals.size());
    for (size_t s = 0; s < spec.signals.size(); ++s) {
        const std::string& name = spec.signals[s];
        sig[s].hub_bottom = nl.add_node(name + "_b");
        sig[s].hub_top = nl.add_node(name + "_t");
        nl.add_resistor("Rmiv_" + name, sig[s].hub_bottom, sig[s].hub_top, policy.r_miv);
        ++cell.miv_count;
    }

    // input pins: stimulus source drives the bottom hub through one
    // interconnect segment; sources are installed by apply_stimulus
    for (size_t i = 0; i < spec.inputs.size(); ++i) {
        const int src = nl.add_node(spec.inputs[i] + "_src");
        nl.add_dc_source("Vin_" + spec.inputs[i], src, 0, 0.0);
        nl.add_resistor("Rint_" + spec.inputs[i], src, sig[i].hub_bottom, policy.r_interconnect);
        cell.input_nodes.push_back(spec.inputs[i] + "_b");
    }

    // stages: pull-up drains join at a drive node that feeds the bottom hub
    // through the net's interconnect segment; pull-down drains sit on the
    // top hub directly
    for (const auto& stage : spec.stages) {
        const std::string& out_name = spec.signals[static_cast<size_t>(stage.out_signal)];
        const int drive = nl.add_node(out_name + "_drv");
        nl.add_resistor("Rint_" + out_name, drive, sig[static_cast<size_t>(stage.out_signal)].hub_bottom,
                        policy.r_interconnect);
        build_p(b, stage.pdn, vdd_rail, drive, sig, params_p, consts);
        build_n(b, stage.pdn, sig[static_cast<size_t>(stage.out_signal)].hub_top, gnd_rail, sig,
                params_n, consts);
    }

    cell.output_node = spec.signals[static_cast<size_t>(spec.output_signal)] + "_b";
    nl.add_capacitor("Cload", nl.add_node(cell.output_node), 0, policy.c_load);
    return cell;
}

std::vector<StimulusArc> stimulus_plan(const CellSpec& spec) {
    std::vector<StimulusArc> plan;
    const size_t n = spec.inputs.size();
    for (size_t pin = 0; pin < n; ++pin) {
        bool found = false;
        for (unsigned mask = 0; mask < (1u << n) && !found; ++mask) {
            std::vector<bool> values(n);
            for (size_t i = 0; i < n; ++i) values[i] = (mask >> i) & 1u;
            values[pin] = false;
            const bool out_lo = spec.eval(values);
            values[pin] = true;
            const bool out_hi = spec.eval(values);
            if (out_lo != out_hi) {
                StimulusArc arc;
                arc.pin = static_cast<int>(pin);
                arc.others = values;
                arc.output_rises_with_pin = out_hi;
                plan.push_back(arc);
                found = true;
            }
        }
        if (!found)
            throw std::runtime_error(spec.name + ": pin " + spec.inputs[pin] +
                                     " never controls the output");
    }
    return plan;
}

void apply_stimulus(CellNetlist& cell, const StimulusArc& arc, double vdd) {
    Netlist& nl = cell.netlist;
    size_t pin_index = 0;
    size_t seen = 0;
    for (size_t k = 0; k < nl.sources.size(); ++k) {
        if (nl.sources[k].name.rfind("Vin_", 0) != 0) continue;
        const size_t this_pin = seen++;
        auto& src = nl.sources[k];
        if (static_cast<int>(this_pin) == arc.pin) {
            // rise at 1 ns, fall at 3 ns, 10 ps edges
            src.pwl = {{0.0, 0.0},
                       {kFirstEdgeAt, 0.0},
                       {kFirstEdgeAt + kEdgeSeconds, vdd},
                       {kSecondEdgeAt, vdd},
                       {kSecondEdgeAt + kEdgeSeconds, 0.0}};
        } else {
            src.pwl = {{0.0, arc.others[this_pin] ? vdd : 0.0}};
        }
        ++pin_index;
    }
}

}  // namespace mivkit
