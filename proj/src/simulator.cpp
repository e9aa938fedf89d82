#include "mivkit/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace mivkit {

namespace {

constexpr double kDvTol = 1e-6;     // V
constexpr double kResTol = 1e-9;    // A
constexpr int kMaxNewton = 100;
constexpr double kDvClamp = 0.3;    // V, per-iteration update limit
constexpr double kGminFloor = 1e-12;

// Dense LU solve with partial pivoting; a near-zero pivot reports failure so
// the caller can fall back instead of propagating garbage.
bool solve_dense(std::vector<std::vector<double>>& a, std::vector<double>& b) {
    const int n = static_cast<int>(b.size());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::fabs(a[k][k]);
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(a[i][k]) > best) {
                best = std::fabs(a[i][k]);
                piv = i;
            }
        if (best < 1e-300) return false;
        if (piv != k) {
            std::swap(a[piv], a[k]);
            std::swap(b[piv], b[k]);
        }
        const double inv = 1.0 / a[k][k];
        for (int i = k + 1; i < n; ++i) {
            const double factor = a[i][k] * inv;
            if (factor == 0.0) continue;
            a[i][k] = 0.0;
            for (int j = k + 1; j < n; ++j) a[i][j] -= factor * a[k][j];
            b[i] -= factor * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double acc = b[i];
        for (int j = i + 1; j < n; ++j) acc -= a[i][j] * b[j];
        b[i] = acc / a[i][i];
    }
    return true;
}

// One charge-storage branch: fixed capacitor or transistor gate-source
// charge. The transient companion works on Q(v) directly so trapezoidal
// charge bookkeeping telescopes exactly.
struct ChargeElement {
    int a = 0;  // positive terminal (gate for transistors)
    int b = 0;
    bool linear = true;
    double c_fixed = 0.0;
    const TransistorInst* device = nullptr;

    double charge(double v) const {
        if (linear) return c_fixed * v;
        return gate_charge(device->params, device->consts, v);
    }
    double capacitance(double v) const {
        if (linear) return c_fixed;
        return gate_capacitance(device->params, device->consts, v);
    }
};

struct ChargeState {
    double q_prev = 0.0;
    double i_prev = 0.0;
};

class MnaSystem {
  public:
    explicit MnaSystem(const Netlist& nl) : nl_(nl) {
        nv_ = nl.node_count() - 1;
        dim_ = nv_ + static_cast<int>(nl.sources.size());
        for (const auto& c : nl.capacitors)
            charges_.push_back({c.n1, c.n2, true, c.farads, nullptr});
        for (const auto& m : nl.transistors)
            charges_.push_back({m.gate, m.source, false, 0.0, &m});
    }

    int dim() const { return dim_; }
    int node_vars() const { return nv_; }
    const std::vector<ChargeElement>& charges() const { return charges_; }

    double v_of(const std::vector<double>& x, int node) const {
        return node == 0 ? 0.0 : x[node - 1];
    }

    // Residual f and Jacobian J at iterate x. f[node-1] accumulates current
    // leaving each non-ground node; the last rows are source branch
    // equations. Charge companions are active when alpha > 0:
    //   i = alpha*(Q(v) - q_prev) - beta*i_prev
    void assemble(const std::vector<double>& x, double time, double gmin, double source_scale,
                  double alpha, double beta, const std::vector<ChargeState>& states,
                  std::vector<double>& f, std::vector<std::vector<double>>& jac) const {
        f.assign(dim_, 0.0);
        jac.assign(dim_, std::vector<double>(dim_, 0.0));

        auto stamp_g = [&](int a, int b, double g) {
            if (a != 0) jac[a - 1][a - 1] += g;
            if (b != 0) jac[b - 1][b - 1] += g;
            if (a != 0 && b != 0) {
                jac[a - 1][b - 1] -= g;
                jac[b - 1][a - 1] -= g;
            }
        };
        auto add_f = [&](int node, double current) {
            if (node != 0) f[node - 1] += current;
        };

        for (const auto& r : nl_.resistors) {
            const double g = 1.0 / r.ohms;
            const double i = g * (v_of(x, r.n1) - v_of(x, r.n2));
            add_f(r.n1, i);
            add_f(r.n2, -i);
            stamp_g(r.n1, r.n2, g);
        }

        for (const auto& m : nl_.transistors) {
            const double vgs = v_of(x, m.gate) - v_of(x, m.source);
            const double vds = v_of(x, m.drain) - v_of(x, m.source);
            const BiasPoint bias{vgs, vds};
            const double id = drain_current(m.params, m.consts, bias);
            const Conductances g = conductances(m.params, m.consts, bias);
            // current into drain, out of source; gate carries no DC current
            add_f(m.drain, id);
            add_f(m.source, -id);
            auto stamp_row = [&](int row, double sign) {
                if (row == 0) return;
                if (m.drain != 0) jac[row - 1][m.drain - 1] += sign * g.gds;
                if (m.gate != 0) jac[row - 1][m.gate - 1] += sign * g.gm;
                if (m.source != 0) jac[row - 1][m.source - 1] -= sign * (g.gds + g.gm);
            };
            stamp_row(m.drain, 1.0);
            stamp_row(m.source, -1.0);
            // conductance floor keeps off devices from isolating nodes
            const double ileak = kGminFloor * (v_of(x, m.drain) - v_of(x, m.source));
            add_f(m.drain, ileak);
            add_f(m.source, -ileak);
            stamp_g(m.drain, m.source, kGminFloor);
        }

        if (alpha > 0.0) {
            for (size_t k = 0; k < charges_.size(); ++k) {
                const auto& ce = charges_[k];
                const double v = v_of(x, ce.a) - v_of(x, ce.b);
                const double i = alpha * (ce.charge(v) - states[k].q_prev) - beta * states[k].i_prev;
                const double geq = alpha * ce.capacitance(v);
                add_f(ce.a, i);
                add_f(ce.b, -i);
                stamp_g(ce.a, ce.b, geq);
            }
        }

        for (size_t k = 0; k < nl_.sources.size(); ++k) {
            const auto& src = nl_.sources[k];
            const int row = nv_ + static_cast<int>(k);
            const double ib = x[row];  // branch current, + terminal into source
            add_f(src.np, ib);
            add_f(src.nn, -ib);
            if (src.np != 0) jac[src.np - 1][row] += 1.0;
            if (src.nn != 0) jac[src.nn - 1][row] -= 1.0;
            f[row] = v_of(x, src.np) - v_of(x, src.nn) - source_scale * src.value(time);
            if (src.np != 0) jac[row][src.np - 1] += 1.0;
            if (src.nn != 0) jac[row][src.nn - 1] -= 1.0;
        }

        if (gmin > 0.0) {
            for (int n = 1; n <= nv_; ++n) {
                f[n - 1] += gmin * x[n - 1];
                jac[n - 1][n - 1] += gmin;
            }
        }
    }

    double max_node_residual(const std::vector<double>& f) const {
        double r = 0.0;
        for (int i = 0; i < nv_; ++i) r = std::max(r, std::fabs(f[i]));
        return r;
    }

    // Newton loop; returns false instead of throwing so callers can ladder
    // through the fallbacks.
    bool newton(std::vector<double>& x, double time, double gmin, double source_scale, double alpha,
                double beta, const std::vector<ChargeState>& states, int& iterations,
                double* final_residual = nullptr) const {
        std::vector<double> f;
        std::vector<std::vector<double>> jac;
        double last_dv = 1.0;
        for (int iter = 0; iter < kMaxNewton; ++iter) {
            ++iterations;
            assemble(x, time, gmin, source_scale, alpha, beta, states, f, jac);
            const double res = max_node_residual(f);
            if (res < kResTol && last_dv < kDvTol) {
                // polish: a couple of extra steps push the KCL residual well
                // below tolerance, which the charge-conservation bookkeeping
                // benefits from
                for (int extra = 0; extra < 3 && max_node_residual(f) > 1e-13; ++extra) {
                    std::vector<double> step(f);
                    for (auto& s : step) s = -s;
                    auto jcopy = jac;
                    if (!solve_dense(jcopy, step)) break;
                    for (int i = 0; i < dim_; ++i) x[i] += step[i];
                    assemble(x, time, gmin, source_scale, alpha, beta, states, f, jac);
                }
                if (final_residual) *final_residual = max_node_residual(f);
                return true;
            }
            std::vector<double> step(f);
            for (auto& s : step) s = -s;
            if (!solve_dense(jac, step)) {
                if (final_residual) *final_residual = res;
                return false;
            }
            double dvmax = 0.0;
            for (int i = 0; i < nv_; ++i) dvmax = std::max(dvmax, std::fabs(step[i]));
            const double scale = dvmax > kDvClamp ? kDvClamp / dvmax : 1.0;
            for (int i = 0; i < dim_; ++i) x[i] += scale * step[i];
            last_dv = dvmax * scale;
            if (!std::isfinite(last_dv)) {
                if (final_residual) *final_residual = res;
                return false;
            }
        }
        if (final_residual) {
            assemble(x, time, gmin, source_scale, alpha, beta, states, f, jac);
            *final_residual = max_node_residual(f);
        }
        return false;
    }

    bool solve_dc(std::vector<double>& x, double time, int& iterations, double& residual) const {
        const std::vector<ChargeState> no_states;
        std::vector<double> x0 = x;
        if (newton(x, time, 0.0, 1.0, 0.0, 0.0, no_states, iterations, &residual)) return true;

        // gmin stepping
        x = x0;
        bool ladder_ok = true;
        for (double gmin = 1e-3; gmin >= 0.99e-12; gmin *= 0.1) {
            if (!newton(x, time, gmin, 1.0, 0.0, 0.0, no_states, iterations, &residual)) {
                ladder_ok = false;
                break;
            }
        }
        if (ladder_ok && newton(x, time, 0.0, 1.0, 0.0, 0.0, no_states, iterations, &residual))
            return true;

        // source stepping
        x = x0;
        ladder_ok = true;
        for (int s = 1; s <= 10; ++s) {
            if (!newton(x, time, 0.0, 0.1 * s, 0.0, 0.0, no_states, iterations, &residual)) {
                ladder_ok = false;
                break;
            }
        }
        return ladder_ok && newton(x, time, 0.0, 1.0, 0.0, 0.0, no_states, iterations, &residual);
    }

  private:
    const Netlist& nl_;
    int nv_ = 0;
    int dim_ = 0;
    std::vector<ChargeElement> charges_;
};

}  // namespace

DcResult dc_operating_point(const Netlist& nl, double time) {
    nl.validate();
    MnaSystem sys(nl);
    std::vector<double> x(sys.dim(), 0.0);
    DcResult result;
    double residual = 0.0;
    if (!sys.solve_dc(x, time, result.iterations, residual))
        throw ConvergenceError("dc operating point did not converge (residual " +
                               std::to_string(residual) + " A)");
    result.node_v.assign(nl.node_count(), 0.0);
    for (int n = 1; n < nl.node_count(); ++n) result.node_v[n] = x[n - 1];
    for (size_t k = 0; k < nl.sources.size(); ++k)
        result.source_i.push_back(-x[sys.node_vars() + k]);
    return result;
}

const std::vector<double>& TransientResult::voltage(const std::string& node) const {
    for (size_t i = 0; i < node_names.size(); ++i)
        if (node_names[i] == node) return node_v[i];
    throw std::runtime_error("no waveform for node '" + node + "'");
}

const std::vector<double>& TransientResult::delivered_current(const std::string& source) const {
    for (size_t i = 0; i < source_names.size(); ++i)
        if (source_names[i] == source) return source_i[i];
    throw std::runtime_error("no waveform for source '" + source + "'");
}

TransientResult transient(const Netlist& nl, double t_stop, double dt) {
    if (!(dt > 0.0) || !(t_stop > 0.0)) throw std::invalid_argument("transient needs dt, t_stop > 0");
    nl.validate();
    MnaSystem sys(nl);
    const auto& charges = sys.charges();

    // DC point with sources at their t = 0 values
    std::vector<double> x(sys.dim(), 0.0);
    int dc_iters = 0;
    double residual = 0.0;
    if (!sys.solve_dc(x, 0.0, dc_iters, residual))
        throw ConvergenceError("transient: no DC point at t = 0 (residual " +
                               std::to_string(residual) + " A)");

    std::vector<ChargeState> state(charges.size());
    for (size_t k = 0; k < charges.size(); ++k) {
        const double v = sys.v_of(x, charges[k].a) - sys.v_of(x, charges[k].b);
        state[k] = {charges[k].charge(v), 0.0};
    }

    const int steps = static_cast<int>(std::llround(t_stop / dt));
    TransientResult out;
    out.node_names = nl.node_names;
    for (const auto& s : nl.sources) out.source_names.push_back(s.name);
    out.time.resize(steps + 1);
    out.node_v.assign(nl.node_count(), std::vector<double>(steps + 1, 0.0));
    out.source_i.assign(nl.sources.size(), std::vector<double>(steps + 1, 0.0));

    auto record = [&](int idx, double t) {
        out.time[idx] = t;
        for (int n = 1; n < nl.node_count(); ++n) out.node_v[n][idx] = x[n - 1];
        for (size_t k = 0; k < nl.sources.size(); ++k)
            out.source_i[k][idx] = -x[sys.node_vars() + k];
    };
    record(0, 0.0);

    double ground_charge = 0.0;  // integral of the KCL current at ground
    std::vector<double> f;
    std::vector<std::vector<double>> jac;

    // one integration sub-step from time t of width h; first_step selects
    // backward Euler, everything else is trapezoidal
    auto advance = [&](double t, double h, bool first_step) -> bool {
        const double alpha = first_step ? 1.0 / h : 2.0 / h;
        const double beta = first_step ? 0.0 : 1.0;
        int iters = 0;
        std::vector<double> x_try = x;
        if (!sys.newton(x_try, t + h, 0.0, 1.0, alpha, beta, state, iters)) return false;
        x = x_try;
        sys.assemble(x, t + h, 0.0, 1.0, alpha, beta, state, f, jac);
        double sum_nodes = 0.0;
        for (int i = 0; i < sys.node_vars(); ++i) sum_nodes += f[i];
        ground_charge += -sum_nodes * h;  // KCL current at ground times dt
        for (size_t k = 0; k < charges.size(); ++k) {
            const double v = sys.v_of(x, charges[k].a) - sys.v_of(x, charges[k].b);
            const double q = charges[k].charge(v);
            const double i = alpha * (q - state[k].q_prev) - beta * state[k].i_prev;
            state[k] = {q, i};
        }
        return true;
    };

    std::vector<double> q_start(charges.size());
    for (size_t k = 0; k < charges.size(); ++k) q_start[k] = state[k].q_prev;

    for (int step = 0; step < steps; ++step) {
        const double t = step * dt;
        const bool first = step == 0;
        if (!advance(t, dt, first)) {
            // retry with halved steps, twice
            bool ok = true;
            for (int half = 0; half < 2 && ok; ++half)
                ok = advance(t + half * dt / 2, dt / 2, first && half == 0);
            if (!ok) {
                ok = true;
                for (int q = 0; q < 4 && ok; ++q) ok = advance(t + q * dt / 4, dt / 4, first && q == 0);
                if (!ok)
                    throw ConvergenceError("transient step at t = " + std::to_string(t + dt) +
                                           " failed after dt/4 retries");
            }
        }
        record(step + 1, (step + 1) * dt);
    }

    double dq_total = 0.0;
    for (size_t k = 0; k < charges.size(); ++k) dq_total += std::fabs(state[k].q_prev - q_start[k]);
    double src_charge = 0.0;
    for (size_t k = 0; k < nl.sources.size(); ++k) {
        double acc = 0.0;
        for (int i = 1; i <= steps; ++i)
            acc += 0.5 * (out.source_i[k][i] + out.source_i[k][i - 1]) * dt;
        src_charge += std::fabs(acc);
    }
    out.charge_residual_rel = std::fabs(ground_charge) / std::max(dq_total + src_charge, 1e-30);
    return out;
}

}  // namespace mivkit
