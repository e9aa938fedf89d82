#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mivkit/layout.hpp"
#include "mivkit/stdcells.hpp"

namespace mivkit {

struct PpaRow {
    std::string cell;
    Variant variant = Variant::traditional;
    double delay_s = 0.0;
    double power_w = 0.0;
    double cell_area_nm2 = 0.0;
    double substrate_nm2 = 0.0;
    double max_charge_residual = 0.0;  // worst conservation residual seen
};

struct PpaVariantSummary {
    Variant variant = Variant::traditional;
    double avg_delay_s = 0.0;
    double avg_power_w = 0.0;
    double delay_delta_pct = 0.0;  // vs traditional
    double power_delta_pct = 0.0;
    double area_delta_pct = 0.0;
};

struct PpaReport {
    std::vector<PpaRow> rows;                      // one per (cell, variant)
    std::vector<PpaVariantSummary> summaries;      // per simulated variant
    std::vector<std::string> diagnostics;          // failed (cell, variant) pairs
};

struct SimSettings {
    double dt = 1e-12;
    double vdd = kVdd;
    int jobs = 0;  // 0 = hardware concurrency
};

// Fitted parameter sets per (variant, polarity); p devices always take the
// traditional entry regardless of the simulated variant.
struct ModelSet {
    std::map<std::pair<Variant, Polarity>, ModelParams> params;
    ModelConstants consts;

    const ModelParams& at(Variant v, Polarity p) const;
};

// Simulates every (cell, variant) over its stimulus plan, aggregates the
// measurements and joins the layout areas. A convergence failure turns into
// a diagnostics entry; the other pairs proceed.
PpaReport run_ppa(const std::vector<std::string>& cells, const std::vector<Variant>& variants,
                  const ModelSet& models, const ParasiticPolicy& policy, const SimSettings& sim,
                  const ProcessParams& process = {});

std::string ppa_csv(const PpaReport& report);
std::string ppa_json(const PpaReport& report);

}  // namespace mivkit
