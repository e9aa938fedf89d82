#pragma once

#include <string>
#include <vector>

#include "mivkit/curves.hpp"

namespace mivkit {

// Process and design lengths, nm.
struct ProcessParams {
    double t_si = 7.0;
    double h_src = 7.0;
    double t_ox = 1.0;
    double n_src = 1e19;  // cm^-3, metadata
    double t_spacer = 10.0;
    double t_box = 100.0;  // metadata
    double t_miv = 25.0;
    double l_src = 48.0;
    double w_src = 192.0;
    double l_g = 24.0;
    double m1_space = 24.0;
    double via = 24.0;
    double m_width = 24.0;
};

void validate(const ProcessParams& p);  // lengths > 0, w_src divisible by 4

enum class LayoutLayer { active, gate, miv, contact };

struct LayoutRect {
    LayoutLayer layer;
    double x = 0.0, y = 0.0, w = 0.0, h = 0.0;  // nm
};

struct TransistorLayout {
    Variant variant = Variant::traditional;
    std::vector<LayoutRect> rects;
    double bbox_w = 0.0;  // along the source-gate-drain direction
    double bbox_h = 0.0;  // along the channel width direction

    double area() const { return bbox_w * bbox_h; }
    double channel_width_sum() const;  // always 192 nm
};

// Footprint generative rules:
//   traditional: [src][spacer][gate][spacer][drain], plus an external gate
//                MIV block (t_miv + m1_space) on the top layer when asked;
//   ch1: the gate column grows by an abutting MIV (no spacing);
//   ch2: two mirrored 96 nm channels at the left/right faces of the central
//        MIV column, active standoff one spacer;
//   ch4: the cross of four 48 nm arms around the MIV, plus one M1 spacing of
//        routing clearance per axis for the source/drain jumpers.
TransistorLayout transistor_footprint(Variant variant, const ProcessParams& p,
                                      bool has_external_gate_miv);

struct CellAreaEntry {
    std::string cell;
    Variant variant = Variant::traditional;
    double top_nm2 = 0.0;
    double bottom_nm2 = 0.0;
    double cell_area_nm2 = 0.0;   // max dims across the two layers
    double substrate_nm2 = 0.0;   // sum of the two layer boxes
    double reduction_pct = 0.0;   // vs the traditional two-layer baseline
};

// Single row per layer, m1_space between adjacent footprints, no diffusion
// sharing. Top row holds the n devices (external gate MIVs in the
// traditional configuration), bottom row the p devices (always traditional,
// no MIV block).
CellAreaEntry cell_layout_area(const std::string& cell, Variant variant, const ProcessParams& p);

struct LibraryAreaSummary {
    std::vector<CellAreaEntry> entries;              // 14 cells x 4 variants
    std::vector<double> avg_reduction_pct;           // per variant
    std::vector<double> best_substrate_reduction_pct;  // per variant
};

LibraryAreaSummary library_area_summary(const ProcessParams& p);

// CSV: cell,variant,top_nm2,bottom_nm2,cell_area_nm2,substrate_nm2,reduction_pct
// with per-variant AVERAGE rows appended.
std::string area_csv(const LibraryAreaSummary& summary);

}  // namespace mivkit
