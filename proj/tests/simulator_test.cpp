#include <array>
#include <cmath>
#include <random>

#include "doctest.h"
#include "mivkit/measure.hpp"
#include "mivkit/netlist.hpp"
#include "mivkit/simulator.hpp"
#include "test_fixtures.hpp"

using namespace mivkit;

namespace {

const ModelParams kPn = testing::reference_params();
const ModelConstants kC0;

ModelParams p_params() {
    ModelParams p = testing::reference_params();
    p.polarity = Polarity::p;
    p.u0 = 0.012;
    p.vth0 = 0.33;
    return p;
}

Netlist inverter(double vin) {
    Netlist nl;
    const int vddsrc = nl.add_node("vddsrc");
    const int vdd = nl.add_node("vdd");
    const int in = nl.add_node("in");
    const int out = nl.add_node("out");
    const int gndrail = nl.add_node("gndrail");
    nl.add_dc_source("Vvdd", vddsrc, 0, 1.0);
    nl.add_resistor("Rvdd", vddsrc, vdd, 5.0);
    nl.add_resistor("Rgnd", gndrail, 0, 5.0);
    nl.add_dc_source("Vin", in, 0, vin);
    nl.add_transistor("Mp", out, in, vdd, p_params(), kC0);
    nl.add_transistor("Mn", out, in, gndrail, kPn, kC0);
    nl.add_capacitor("Cload", out, 0, 1e-15);
    return nl;
}

}  // namespace

TEST_CASE("voltage divider solves exactly") {
    Netlist nl;
    const int a = nl.add_node("a");
    const int mid = nl.add_node("mid");
    nl.add_dc_source("V1", a, 0, 1.0);
    nl.add_resistor("R1", a, mid, 1000.0);
    nl.add_resistor("R2", mid, 0, 1000.0);
    DcResult dc = dc_operating_point(nl);
    CHECK(std::fabs(dc.node_v[mid] - 0.5) < 1e-9);
    CHECK(dc.source_i[0] == doctest::Approx(0.5e-3).epsilon(1e-9));  // delivered into the divider
}

TEST_CASE("floating node is rejected before solving") {
    Netlist nl;
    const int a = nl.add_node("a");
    nl.add_node("floating");
    nl.add_dc_source("V1", a, 0, 1.0);
    nl.add_resistor("R1", a, 0, 100.0);
    CHECK_THROWS_WITH_AS(dc_operating_point(nl), doctest::Contains("floating"), std::runtime_error);
}

TEST_CASE("inverter dc output sits within 1 mV of the rail") {
    Netlist lo = inverter(0.0);
    DcResult dc = dc_operating_point(lo);
    const double vout = dc.node_v[lo.node("out")];
    CHECK(vout > 1.0 - 1e-3);

    // independent leakage-ratio oracle: bisect the 1-D output equation
    // In(vgs=0, vds=v) + Ip(vgs=-1, vds=v-1) = 0 using the device model only
    const ModelParams pp = p_params();
    auto node_current = [&](double v) {
        return drain_current(kPn, kC0, {0.0, v}) + drain_current(pp, kC0, {-1.0, v - 1.0});
    };
    double lob = 0.5, hib = 1.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lob + hib);
        (node_current(mid) > 0.0 ? hib : lob) = mid;
    }
    CHECK(vout == doctest::Approx(0.5 * (lob + hib)).epsilon(1e-3));

    Netlist hi = inverter(1.0);
    DcResult dc2 = dc_operating_point(hi);
    CHECK(dc2.node_v[hi.node("out")] < 1e-3);
}

TEST_CASE("random linear networks match an independent dense solve") {
    std::mt19937_64 rng(2024);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    };
    for (int trial = 0; trial < 20; ++trial) {
        const int n_nodes = 10;
        Netlist nl;
        std::vector<int> nodes{0};
        for (int i = 1; i < n_nodes; ++i) nodes.push_back(nl.add_node("n" + std::to_string(i)));

        struct Edge {
            int a, b;
            double g;
        };
        std::vector<Edge> edges;
        for (int i = 1; i < n_nodes; ++i) {  // spanning tree keeps everything connected
            const int other = static_cast<int>(rng() % static_cast<std::uint64_t>(i));
            edges.push_back({nodes[i], nodes[other], 1.0 / uniform(10.0, 1e4)});
        }
        for (int e = 0; e < 8; ++e) {
            const int a = static_cast<int>(rng() % n_nodes);
            const int b = static_cast<int>(rng() % n_nodes);
            if (a == b) continue;
            edges.push_back({nodes[a], nodes[b], 1.0 / uniform(10.0, 1e4)});
        }
        for (size_t e = 0; e < edges.size(); ++e)
            nl.add_resistor("R" + std::to_string(e), edges[e].a, edges[e].b, 1.0 / edges[e].g);
        const double e1 = uniform(0.5, 2.0);
        nl.add_dc_source("V1", nodes[1], 0, e1);

        DcResult dc = dc_operating_point(nl);

        // independent oracle: nodal equations with the source eliminated by
        // substitution, solved by Gauss-Jordan written here in the test
        const int unknowns = n_nodes - 2;  // ground fixed, node 1 pinned to e1
        std::vector<std::vector<double>> a(unknowns, std::vector<double>(unknowns + 1, 0.0));
        auto col = [&](int node) { return node - 2; };  // nodes 2.. are unknowns
        for (const auto& ed : edges) {
            for (int side = 0; side < 2; ++side) {
                const int self = side == 0 ? ed.a : ed.b;
                const int other = side == 0 ? ed.b : ed.a;
                if (self < 2) continue;
                a[col(self)][col(self)] += ed.g;
                if (other >= 2)
                    a[col(self)][col(other)] -= ed.g;
                else if (other == 1)
                    a[col(self)][unknowns] += ed.g * e1;
            }
        }
        for (int k = 0; k < unknowns; ++k) {
            int piv = k;
            for (int i = k + 1; i < unknowns; ++i)
                if (std::fabs(a[i][k]) > std::fabs(a[piv][k])) piv = i;
            std::swap(a[k], a[piv]);
            const double d = a[k][k];
            for (int j = k; j <= unknowns; ++j) a[k][j] /= d;
            for (int i = 0; i < unknowns; ++i) {
                if (i == k) continue;
                const double factor = a[i][k];
                for (int j = k; j <= unknowns; ++j) a[i][j] -= factor * a[k][j];
            }
        }
        for (int node = 2; node < n_nodes; ++node)
            CHECK(std::fabs(dc.node_v[node] - a[col(node)][unknowns]) < 1e-9);
        CHECK(std::fabs(dc.node_v[1] - e1) < 1e-12);
    }
}

TEST_CASE("rc step response matches the analytic curve") {
    const double r = 1000.0, c = 1e-12, rc = r * c;
    Netlist nl;
    const int in = nl.add_node("in");
    const int out = nl.add_node("out");
    nl.add_pwl_source("Vstep", in, 0, {{0.0, 0.0}, {rc * 1e-9, 1.0}});
    nl.add_resistor("R1", in, out, r);
    nl.add_capacitor("C1", out, 0, c);

    TransientResult tr = transient(nl, 5 * rc, rc / 100.0);
    const auto& v = tr.voltage("out");
    // value at t = RC
    const double expected = 1.0 - std::exp(-1.0);
    CHECK(std::fabs(v[100] - expected) / expected < 0.005);
    CHECK(tr.charge_residual_rel < 1e-3);
}

TEST_CASE("trapezoidal convergence order is near two") {
    const double r = 1000.0, c = 1e-12, rc = r * c;
    auto run_error = [&](double dt) {
        Netlist nl;
        const int in = nl.add_node("in");
        const int out = nl.add_node("out");
        nl.add_pwl_source("Vstep", in, 0, {{0.0, 0.0}, {rc * 1e-9, 1.0}});
        nl.add_resistor("R1", in, out, r);
        nl.add_capacitor("C1", out, 0, c);
        TransientResult tr = transient(nl, rc, dt);
        double err = 0.0;
        for (size_t i = 1; i < tr.time.size(); ++i) {
            const double exact = 1.0 - std::exp(-tr.time[i] / rc);
            err = std::max(err, std::fabs(tr.voltage("out")[i] - exact));
        }
        return err;
    };
    const double e1 = run_error(rc / 100.0);
    const double e2 = run_error(rc / 200.0);
    const double order = std::log2(e1 / e2);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
}

TEST_CASE("zero-input circuit stays at its dc point") {
    Netlist nl = inverter(0.0);
    DcResult dc = dc_operating_point(nl);
    TransientResult tr = transient(nl, 1e-9, 1e-12);
    for (int n = 1; n < nl.node_count(); ++n)
        for (double v : tr.node_v[n]) CHECK(v == doctest::Approx(dc.node_v[n]).epsilon(1e-9));
}

TEST_CASE("passivity: all sources at zero leave no charge flow") {
    Netlist nl = inverter(0.0);
    nl.sources[0].pwl = {{0.0, 0.0}};  // VDD forced to 0
    TransientResult tr = transient(nl, 1e-9, 1e-12);
    double q = 0.0;
    for (size_t i = 1; i < tr.time.size(); ++i)
        q += 0.5 * (tr.source_i[0][i] + tr.source_i[0][i - 1]) * (tr.time[i] - tr.time[i - 1]);
    CHECK(std::fabs(q) < 1e-15);
}

TEST_CASE("transistor stamp jacobian matches finite differences of the stamped current") {
    // the stamp uses drain_current/conductances on raw terminal voltages;
    // verify the 3x3 terminal jacobian numerically, including vds < 0
    const double h = 1e-6;
    for (auto [vd, vg, vs] : {std::array<double, 3>{0.7, 0.9, 0.0},
                              std::array<double, 3>{0.1, 1.0, 0.4},
                              std::array<double, 3>{0.3, 0.5, 0.31},
                              std::array<double, 3>{0.5, 0.5, 0.5}}) {
        auto id_at = [&](double d, double g, double s) {
            return drain_current(kPn, kC0, {g - s, d - s});
        };
        const Conductances g = conductances(kPn, kC0, {vg - vs, vd - vs});
        const double did_dd = (id_at(vd + h, vg, vs) - id_at(vd - h, vg, vs)) / (2 * h);
        const double did_dg = (id_at(vd, vg + h, vs) - id_at(vd, vg - h, vs)) / (2 * h);
        const double did_ds = (id_at(vd, vg, vs + h) - id_at(vd, vg, vs - h)) / (2 * h);
        CHECK(std::fabs(g.gds - did_dd) <= 1e-4 * std::fabs(did_dd) + 1e-12);
        CHECK(std::fabs(g.gm - did_dg) <= 1e-4 * std::fabs(did_dg) + 1e-12);
        CHECK(std::fabs(-(g.gm + g.gds) - did_ds) <= 1e-4 * std::fabs(did_ds) + 1e-12);
    }
}

TEST_CASE("ideal delay line measures the constructed delay") {
    Netlist nl;
    const int in = nl.add_node("in");
    const int out = nl.add_node("out");
    const int vdd = nl.add_node("vdd");
    nl.add_dc_source("Vvdd", vdd, 0, 1.0);
    nl.add_resistor("Rvdd", vdd, 0, 1e6);
    nl.add_pwl_source("Vin", in, 0, {{0.0, 0.0}, {1e-9, 0.0}, {1.01e-9, 1.0}});
    nl.add_pwl_source("Vout", out, 0, {{0.0, 0.0}, {1.1e-9, 0.0}, {1.11e-9, 1.0}});
    const double dt = 1e-12;
    TransientResult tr = transient(nl, 2e-9, dt);
    Measurement m = measure(tr, "in", "out", 1.0);
    CHECK(std::fabs(m.avg_delay - 100e-12) <= dt / 2);
    CHECK(m.t_plh == doctest::Approx(m.avg_delay));
}

TEST_CASE("measurement without a crossing raises") {
    Netlist nl = inverter(0.0);
    TransientResult tr = transient(nl, 1e-10, 1e-12);
    CHECK_THROWS_AS(measure(tr, "in", "out", 1.0), MeasurementError);
}
