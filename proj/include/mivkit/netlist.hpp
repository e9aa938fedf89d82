#pragma once

#include <string>
#include <vector>

#include "mivkit/device_model.hpp"

namespace mivkit {

// Node 0 is ground. Element node fields are indices into Netlist::node_names.
struct Resistor {
    std::string name;
    int n1 = 0, n2 = 0;
    double ohms = 0.0;
};

struct Capacitor {
    std::string name;
    int n1 = 0, n2 = 0;
    double farads = 0.0;
};

struct TransistorInst {
    std::string name;
    int drain = 0, gate = 0, source = 0;
    ModelParams params;
    ModelConstants consts;
};

// Independent voltage source, DC or piecewise-linear in time.
struct VSource {
    std::string name;
    int np = 0, nn = 0;
    std::vector<std::pair<double, double>> pwl;  // (t, v); single entry = DC

    double value(double t) const;
};

struct Netlist {
    std::vector<std::string> node_names{"0"};
    std::vector<Resistor> resistors;
    std::vector<Capacitor> capacitors;
    std::vector<TransistorInst> transistors;
    std::vector<VSource> sources;
    double tran_dt = 0.0;     // from a .tran card, 0 when absent
    double tran_stop = 0.0;

    int add_node(const std::string& name);        // get-or-create
    int node(const std::string& name) const;      // -1 when missing
    int node_count() const { return static_cast<int>(node_names.size()); }

    Resistor& add_resistor(const std::string& name, int n1, int n2, double ohms);
    Capacitor& add_capacitor(const std::string& name, int n1, int n2, double farads);
    TransistorInst& add_transistor(const std::string& name, int d, int g, int s,
                                   const ModelParams& params, const ModelConstants& consts);
    VSource& add_dc_source(const std::string& name, int np, int nn, double volts);
    VSource& add_pwl_source(const std::string& name, int np, int nn,
                            std::vector<std::pair<double, double>> pwl);

    // Invariants: >= 1 source, positive R/C values, unique names, every node
    // reachable from ground through the element graph. Throws on violation.
    void validate() const;
};

// Line-oriented text format: R/C/M/V cards, `.tran dt tstop`, '*' comments.
// Transistor cards reference `model=<file>` cards, resolved relative to the
// netlist file's directory.
Netlist parse_netlist(const std::string& path);
Netlist parse_netlist_text(const std::string& text, const std::string& diag_name,
                           const std::string& model_dir);

}  // namespace mivkit
