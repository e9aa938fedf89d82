#include "mivkit/ppa.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "mivkit/measure.hpp"
#include "mivkit/simulator.hpp"
#include "mivkit/text_util.hpp"

namespace mivkit {

const ModelParams& ModelSet::at(Variant v, Polarity p) const {
    // bottom-layer devices are the traditional 2D transistor in every
    // configuration
    auto it = params.find({p == Polarity::p ? Variant::traditional : v, p});
    if (it == params.end())
        throw std::runtime_error("missing fitted parameters for " + to_string(v) + "/" +
                                 to_string(p));
    return it->second;
}

namespace {

struct TaskResult {
    PpaRow row;
    bool ok = false;
    std::string diagnostic;
};

TaskResult simulate_pair(const std::string& cell_name, Variant variant, const ModelSet& models,
                         const ParasiticPolicy& policy, const SimSettings& sim,
                         const ProcessParams& process) {
    TaskResult out;
    out.row.cell = cell_name;
    out.row.variant = variant;
    try {
        const CellSpec& spec = cell_by_name(cell_name);
        const ModelParams& pn = models.at(variant, Polarity::n);
        const ModelParams& pp = models.at(variant, Polarity::p);

        double delay_sum = 0.0;
        double power_sum = 0.0;
        int delay_count = 0;
        int window_count = 0;
        for (const StimulusArc& arc : stimulus_plan(spec)) {
            CellNetlist cell = build_cell_netlist(spec, pn, pp, models.consts, policy, sim.vdd);
            apply_stimulus(cell, arc, sim.vdd);
            TransientResult tr = transient(cell.netlist, kWindowSeconds, sim.dt);
            out.row.max_charge_residual = std::max(out.row.max_charge_residual, tr.charge_residual_rel);
            Measurement m =
                measure(tr, cell.input_nodes[static_cast<size_t>(arc.pin)], cell.output_node, sim.vdd);
            delay_sum += m.avg_delay * m.arcs;
            delay_count += m.arcs;
            power_sum += m.avg_power;
            ++window_count;
        }
        out.row.delay_s = delay_sum / delay_count;
        out.row.power_w = power_sum / window_count;

        const CellAreaEntry area = cell_layout_area(cell_name, variant, process);
        out.row.cell_area_nm2 = area.cell_area_nm2;
        out.row.substrate_nm2 = area.substrate_nm2;
        out.ok = true;
    } catch (const std::exception& e) {
        out.diagnostic = cell_name + "/" + to_string(variant) + ": " + e.what();
    }
    return out;
}

}  // namespace

PpaReport run_ppa(const std::vector<std::string>& cells, const std::vector<Variant>& variants,
                  const ModelSet& models, const ParasiticPolicy& policy, const SimSettings& sim,
                  const ProcessParams& process) {
    struct Task {
        std::string cell;
        Variant variant;
    };
    std::vector<Task> tasks;
    for (const auto& cell : cells)
        for (Variant v : variants) tasks.push_back({cell, v});

    std::vector<TaskResult> results(tasks.size());
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int jobs = std::max(1, std::min<int>(sim.jobs > 0 ? sim.jobs : hw,
                                               static_cast<int>(tasks.size())));
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
            results[i] = simulate_pair(tasks[i].cell, tasks[i].variant, models, policy, sim, process);
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    PpaReport report;
    for (auto& r : results) {
        if (r.ok)
            report.rows.push_back(r.row);
        else
            report.diagnostics.push_back(r.diagnostic);
    }

    // per-variant averages and deltas vs traditional
    auto variant_avg = [&](Variant v, auto field) {
        double acc = 0.0;
        int n = 0;
        for (const auto& row : report.rows)
            if (row.variant == v) {
                acc += row.*field;
                ++n;
            }
        return n ? acc / n : 0.0;
    };
    const bool have_traditional =
        std::find(variants.begin(), variants.end(), Variant::traditional) != variants.end();
    const double base_delay = variant_avg(Variant::traditional, &PpaRow::delay_s);
    const double base_power = variant_avg(Variant::traditional, &PpaRow::power_w);
    const double base_area = variant_avg(Variant::traditional, &PpaRow::cell_area_nm2);
    for (Variant v : variants) {
        PpaVariantSummary s;
        s.variant = v;
        s.avg_delay_s = variant_avg(v, &PpaRow::delay_s);
        s.avg_power_w = variant_avg(v, &PpaRow::power_w);
        if (have_traditional && base_delay > 0.0) {
            s.delay_delta_pct = 100.0 * (s.avg_delay_s / base_delay - 1.0);
            s.power_delta_pct = 100.0 * (s.avg_power_w / base_power - 1.0);
            s.area_delta_pct = 100.0 * (variant_avg(v, &PpaRow::cell_area_nm2) / base_area - 1.0);
        }
        report.summaries.push_back(s);
    }
    return report;
}

std::string ppa_csv(const PpaReport& report) {
    std::ostringstream out;
    out << "cell,variant,delay_s,power_W,cell_area_nm2,substrate_area_nm2\n";
    for (const auto& r : report.rows)
        out << r.cell << "," << to_string(r.variant) << "," << format_double(r.delay_s) << ","
            << format_double(r.power_w) << "," << format_double(r.cell_area_nm2) << ","
            << format_double(r.substrate_nm2) << "\n";
    return out.str();
}

std::string ppa_json(const PpaReport& report) {
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        j["rows"].push_back({{"cell", r.cell},
                             {"variant", to_string(r.variant)},
                             {"delay_s", r.delay_s},
                             {"power_w", r.power_w},
                             {"cell_area_nm2", r.cell_area_nm2},
                             {"substrate_area_nm2", r.substrate_nm2},
                             {"charge_residual_rel", r.max_charge_residual}});
    }
    j["variant_summary"] = nlohmann::ordered_json::array();
    for (const auto& s : report.summaries) {
        j["variant_summary"].push_back({{"variant", to_string(s.variant)},
                                        {"avg_delay_s", s.avg_delay_s},
                                        {"avg_power_w", s.avg_power_w},
                                        {"delay_delta_pct", s.delay_delta_pct},
                                        {"power_delta_pct", s.power_delta_pct},
                                        {"area_delta_pct", s.area_delta_pct}});
    }
    j["diagnostics"] = report.diagnostics;
    return j.dump(2) + "\n";
}

}  // namespace mivkit
