#include <algorithm>
#include <stdexcept>

#include "doctest.h"
#include "mivkit/measure.hpp"
#include "mivkit/simulator.hpp"
#include "mivkit/stdcells.hpp"
#include "test_fixtures.hpp"

using namespace mivkit;

namespace {

const ModelConstants kC0;

ModelParams n_params() { return testing::reference_params(); }

ModelParams p_params() {
    ModelParams p = testing::reference_params();
    p.polarity = Polarity::p;
    p.u0 = 0.012;
    p.vth0 = 0.33;
    return p;
}

bool expected_output(const std::string& cell, const std::vector<bool>& in) {
    if (cell == "INV1X1") return !in[0];
    if (cell == "NAND2X1") return !(in[0] && in[1]);
    if (cell == "NAND3X1") return !(in[0] && in[1] && in[2]);
    if (cell == "NOR2X1") return !(in[0] || in[1]);
    if (cell == "NOR3X1") return !(in[0] || in[1] || in[2]);
    if (cell == "AND2X1") return in[0] && in[1];
    if (cell == "AND3X1") return in[0] && in[1] && in[2];
    if (cell == "OR2X1") return in[0] || in[1];
    if (cell == "OR3X1") return in[0] || in[1] || in[2];
    if (cell == "AOI2X1") return !((in[0] && in[1]) || in[2]);
    if (cell == "OAI2X1") return !((in[0] || in[1]) && in[2]);
    if (cell == "XOR2X1") return in[0] != in[1];
    if (cell == "XNOR2X1") return in[0] == in[1];
    if (cell == "MUX2X1") return in[2] ? in[0] : in[1];  // S ? A : B
    throw std::runtime_error("no truth function for " + cell);
}

}  // namespace

TEST_CASE("the library holds the fourteen cells") {
    const std::vector<std::string> expected = {"AND2X1", "AND3X1", "AOI2X1",  "INV1X1", "MUX2X1",
                                               "NAND2X1", "NAND3X1", "NOR2X1", "NOR3X1", "OAI2X1",
                                               "OR2X1",  "OR3X1",  "XNOR2X1", "XOR2X1"};
    std::vector<std::string> names;
    for (const auto& c : cell_library()) names.push_back(c.name);
    std::sort(names.begin(), names.end());
    CHECK(names == expected);
    CHECK_THROWS_AS(cell_by_name("DFFX1"), std::invalid_argument);
}

TEST_CASE("boolean evaluation matches every truth table") {
    for (const auto& spec : cell_library()) {
        const size_t n = spec.inputs.size();
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            std::vector<bool> in(n);
            for (size_t i = 0; i < n; ++i) in[i] = (mask >> i) & 1u;
            CHECK(spec.eval(in) == expected_output(spec.name, in));
        }
    }
}

TEST_CASE("netlists are complementary and carry the counted parasitics") {
    for (const auto& spec : cell_library()) {
        CellNetlist cell = build_cell_netlist(spec, n_params(), p_params(), kC0, {});
        int n_count = 0, p_count = 0, miv_resistors = 0, load_caps = 0;
        for (const auto& m : cell.netlist.transistors)
            (m.params.polarity == Polarity::n ? n_count : p_count) += 1;
        for (const auto& r : cell.netlist.resistors)
            if (r.name.rfind("Rmiv_", 0) == 0) {
                ++miv_resistors;
                CHECK(r.ohms == 7.0);
            }
        for (const auto& c : cell.netlist.capacitors)
            if (c.name == "Cload") {
                ++load_caps;
                CHECK(c.farads == 1e-15);
            }
        CHECK(n_count == p_count);
        CHECK(n_count == spec.transistors_per_side());
        // one MIV per net joining the layers: every pin plus every stage net
        CHECK(miv_resistors == static_cast<int>(spec.inputs.size() + spec.stages.size()));
        CHECK(miv_resistors == cell.miv_count);
        CHECK(load_caps == 1);
    }

    // the inverter's output net carries exactly one MIV resistor
    CellNetlist inv = build_cell_netlist(cell_by_name("INV1X1"), n_params(), p_params(), kC0, {});
    int output_mivs = 0;
    for (const auto& r : inv.netlist.resistors)
        if (r.name == "Rmiv_Y") ++output_mivs;
    CHECK(output_mivs == 1);

    CHECK_THROWS_AS(build_cell_netlist(cell_by_name("INV1X1"), p_params(), n_params(), kC0, {}),
                    std::invalid_argument);
}

TEST_CASE("dc output sits at the correct rail on every input corner") {
    // the per-variant sweep runs in the acceptance suite; one parameter set
    // here keeps the unit suite quick
    for (const auto& spec : cell_library()) {
        const size_t n = spec.inputs.size();
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            CellNetlist cell = build_cell_netlist(spec, n_params(), p_params(), kC0, {});
            std::vector<bool> in(n);
            size_t pin = 0;
            for (auto& src : cell.netlist.sources) {
                if (src.name.rfind("Vin_", 0) != 0) continue;
                in[pin] = (mask >> pin) & 1u;
                src.pwl = {{0.0, in[pin] ? 1.0 : 0.0}};
                ++pin;
            }
            DcResult dc = dc_operating_point(cell.netlist);
            const double vout = dc.node_v[cell.netlist.node(cell.output_node)];
            if (expected_output(spec.name, in))
                CHECK(vout > 0.9);
            else
                CHECK(vout < 0.1);
        }
    }
}

TEST_CASE("stimulus plans cover every pin with a controlling assignment") {
    CHECK(stimulus_plan(cell_by_name("INV1X1")).size() == 1);
    CHECK(stimulus_plan(cell_by_name("NAND3X1")).size() == 3);
    for (const auto& spec : cell_library()) {
        const auto plan = stimulus_plan(spec);
        CHECK(plan.size() == spec.inputs.size());
        for (const auto& arc : plan) {
            std::vector<bool> in = arc.others;
            in[static_cast<size_t>(arc.pin)] = false;
            const bool lo = spec.eval(in);
            in[static_cast<size_t>(arc.pin)] = true;
            CHECK(spec.eval(in) != lo);
            CHECK(arc.output_rises_with_pin == spec.eval(in));
        }
    }
}

TEST_CASE("every arc produces an output crossing in simulation") {
    // full library coverage runs in the acceptance suite; exercise the
    // two-stage and mux topologies here
    for (const char* name : {"NAND2X1", "AND2X1", "MUX2X1"}) {
        const CellSpec& spec = cell_by_name(name);
        for (const StimulusArc& arc : stimulus_plan(spec)) {
            CellNetlist cell = build_cell_netlist(spec, n_params(), p_params(), kC0, {});
            apply_stimulus(cell, arc);
            TransientResult tr = transient(cell.netlist, kWindowSeconds, 2e-12);
            Measurement m =
                measure(tr, cell.input_nodes[static_cast<size_t>(arc.pin)], cell.output_node, 1.0);
            CHECK(m.arcs == 2);
            CHECK(m.avg_delay > 1e-13);
            CHECK(m.avg_delay < 1e-9);
            CHECK(tr.charge_residual_rel < 1e-3);
        }
    }
}
