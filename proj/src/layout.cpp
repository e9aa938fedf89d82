#include "mivkit/layout.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mivkit/stdcells.hpp"
#include "mivkit/text_util.hpp"

namespace mivkit {

void validate(const ProcessParams& p) {
    for (double v : {p.t_si, p.h_src, p.t_ox, p.t_spacer, p.t_box, p.t_miv, p.l_src, p.w_src, p.l_g,
                     p.m1_space, p.via, p.m_width}) {
        if (!(v > 0.0)) throw std::invalid_argument("process lengths must be > 0");
    }
    if (std::fmod(p.w_src, 4.0) != 0.0)
        throw std::invalid_argument("w_src must divide into four channel strips");
}

double TransistorLayout::channel_width_sum() const {
    // channel width is the gate strip's long dimension (the strip is drawn
    // along its channel face)
    double sum = 0.0;
    for (const auto& r : rects)
        if (r.layer == LayoutLayer::gate) sum += std::max(r.w, r.h);
    return sum;
}

namespace {

void add_contact(TransistorLayout& t, const ProcessParams& p, const LayoutRect& active) {
    t.rects.push_back({LayoutLayer::contact, active.x + (active.w - p.via) / 2,
                       active.y + (active.h - p.via) / 2, p.via, p.via});
}

TransistorLayout planar(Variant variant, const ProcessParams& p, bool external_miv) {
    // [src][spacer][gate(+abutting MIV for ch1)][spacer][drain]
    TransistorLayout t;
    t.variant = variant;
    const double gate_col = variant == Variant::ch1 ? p.l_g + p.t_miv : p.l_g;
    double x = 0.0;
    const LayoutRect src{LayoutLayer::active, x, 0.0, p.l_src, p.w_src};
    t.rects.push_back(src);
    x += p.l_src + p.t_spacer;
    t.rects.push_back({LayoutLayer::gate, x, 0.0, p.l_g, p.w_src});
    if (variant == Variant::ch1)
        t.rects.push_back({LayoutLayer::miv, x + p.l_g, (p.w_src - p.t_miv) / 2, p.t_miv, p.t_miv});
    x += gate_col + p.t_spacer;
    const LayoutRect drn{LayoutLayer::active, x, 0.0, p.l_src, p.w_src};
    t.rects.push_back(drn);
    x += p.l_src;
    if (external_miv) {
        t.rects.push_back(
            {LayoutLayer::miv, x + p.m1_space, (p.w_src - p.t_miv) / 2, p.t_miv, p.t_miv});
        x += p.m1_space + p.t_miv;
    }
    add_contact(t, p, src);
    add_contact(t, p, drn);
    t.bbox_w = x;
    t.bbox_h = p.w_src;
    return t;
}

TransistorLayout mirrored_two_channel(const ProcessParams& p) {
    // two 96 nm channels at the left/right MIV faces, mirrored source/drain
    TransistorLayout t;
    t.variant = Variant::ch2;
    const double half = p.w_src / 2;
    const double col_x = p.l_src + p.t_spacer;
    const LayoutRect left_top{LayoutLayer::active, 0.0, half, p.l_src, half};
    const LayoutRect left_bot{LayoutLayer::active, 0.0, 0.0, p.l_src, half};
    const double right_x = col_x + p.t_miv + p.t_spacer;
    const LayoutRect right_top{LayoutLayer::active, right_x, half, p.l_src, half};
    const LayoutRect right_bot{LayoutLayer::active, right_x, 0.0, p.l_src, half};
    for (const auto& r : {left_top, left_bot, right_top, right_bot}) {
        t.rects.push_back(r);
        add_contact(t, p, r);
    }
    t.rects.push_back({LayoutLayer::miv, col_x, (p.w_src - p.t_miv) / 2, p.t_miv, p.t_miv});
    // the MIV column gates both channels; one strip per channel
    t.rects.push_back({LayoutLayer::gate, col_x, half, p.t_miv, half});
    t.rects.push_back({LayoutLayer::gate, col_x, 0.0, p.t_miv, half});
    t.bbox_w = right_x + p.l_src;
    t.bbox_h = p.w_src;
    return t;
}

TransistorLayout cross_four_channel(const ProcessParams& p) {
    // four 48 nm arms around the central MIV; one M1 spacing of routing
    // clearance per axis for the source/drain jumpers through the corners
    TransistorLayout t;
    t.variant = Variant::ch4;
    const double arm = p.w_src / 4;
    const double core = 2 * p.l_src + 2 * p.t_spacer + p.t_miv;
    const double cx = p.l_src + p.t_spacer;  // MIV column origin
    const LayoutRect west{LayoutLayer::active, 0.0, (core - arm) / 2, p.l_src, arm};
    const LayoutRect east{LayoutLayer::active, cx + p.t_miv + p.t_spacer, (core - arm) / 2, p.l_src, arm};
    const LayoutRect south{LayoutLayer::active, (core - arm) / 2, 0.0, arm, p.l_src};
    const LayoutRect north{LayoutLayer::active, (core - arm) / 2, cx + p.t_miv + p.t_spacer, arm, p.l_src};
    for (const auto& r : {west, east, south, north}) {
        t.rects.push_back(r);
        add_contact(t, p, r);
    }
    t.rects.push_back({LayoutLayer::miv, cx, cx, p.t_miv, p.t_miv});
    // four channel strips, one per MIV face
    t.rects.push_back({LayoutLayer::gate, cx - p.t_spacer, (core - arm) / 2, p.t_spacer, arm});
    t.rects.push_back({LayoutLayer::gate, cx + p.t_miv, (core - arm) / 2, p.t_spacer, arm});
    t.rects.push_back({LayoutLayer::gate, (core - arm) / 2, cx - p.t_spacer, arm, p.t_spacer});
    t.rects.push_back({LayoutLayer::gate, (core - arm) / 2, cx + p.t_miv, arm, p.t_spacer});
    t.bbox_w = core + p.m1_space;
    t.bbox_h = core + p.m1_space;
    return t;
}

}  // namespace

TransistorLayout transistor_footprint(Variant variant, const ProcessParams& p,
                                      bool has_external_gate_miv) {
    validate(p);
    switch (variant) {
        case Variant::traditional:
            return planar(variant, p, has_external_gate_miv);
        case Variant::ch1:
            return planar(variant, p, false);
        case Variant::ch2:
            return mirrored_two_channel(p);
        case Variant::ch4:
            return cross_four_channel(p);
    }
    throw std::invalid_argument("unknown variant");
}

namespace {

struct RowBox {
    double w = 0.0;
    double h = 0.0;
};

RowBox place_row(const TransistorLayout& footprint, int count, const ProcessParams& p) {
    RowBox box;
    box.w = count * footprint.bbox_w + (count - 1) * p.m1_space;
    box.h = footprint.bbox_h;
    return box;
}

}  // namespace

CellAreaEntry cell_layout_area(const std::string& cell, Variant variant, const ProcessParams& p) {
    const CellSpec& spec = cell_by_name(cell);
    const int per_side = spec.transistors_per_side();

    const TransistorLayout n_fp =
        transistor_footprint(variant, p, variant == Variant::traditional);
    const TransistorLayout p_fp = transistor_footprint(Variant::traditional, p, false);
    const RowBox top = place_row(n_fp, per_side, p);
    const RowBox bottom = place_row(p_fp, per_side, p);

    CellAreaEntry e;
    e.cell = cell;
    e.variant = variant;
    e.top_nm2 = top.w * top.h;
    e.bottom_nm2 = bottom.w * bottom.h;
    e.cell_area_nm2 = std::max(top.w, bottom.w) * std::max(top.h, bottom.h);
    e.substrate_nm2 = e.top_nm2 + e.bottom_nm2;
    return e;
}

LibraryAreaSummary library_area_summary(const ProcessParams& p) {
    LibraryAreaSummary summary;
    summary.avg_reduction_pct.assign(kNumVariants, 0.0);
    summary.best_substrate_reduction_pct.assign(kNumVariants, 0.0);

    for (const auto& spec : cell_library()) {
        const CellAreaEntry base = cell_layout_area(spec.name, Variant::traditional, p);
        for (size_t v = 0; v < all_variants().size(); ++v) {
            CellAreaEntry e = cell_layout_area(spec.name, all_variants()[v], p);
            e.reduction_pct = 100.0 * (1.0 - e.cell_area_nm2 / base.cell_area_nm2);
            summary.avg_reduction_pct[v] += e.reduction_pct;
            const double sub_red = 100.0 * (1.0 - e.substrate_nm2 / base.substrate_nm2);
            summary.best_substrate_reduction_pct[v] =
                std::max(summary.best_substrate_reduction_pct[v], sub_red);
            summary.entries.push_back(e);
        }
    }
    const double cells = static_cast<double>(cell_library().size());
    for (auto& avg : summary.avg_reduction_pct) avg /= cells;
    return summary;
}

std::string area_csv(const LibraryAreaSummary& summary) {
    std::ostringstream out;
    out << "cell,variant,top_nm2,bottom_nm2,cell_area_nm2,substrate_nm2,reduction_pct\n";
    for (const auto& e : summary.entries)
        out << e.cell << "," << to_string(e.variant) << "," << format_double(e.top_nm2) << ","
            << format_double(e.bottom_nm2) << "," << format_double(e.cell_area_nm2) << ","
            << format_double(e.substrate_nm2) << "," << format_double(e.reduction_pct) << "\n";
    for (size_t v = 0; v < all_variants().size(); ++v)
        out << "AVERAGE," << to_string(all_variants()[v]) << ",,,,,"
            << format_double(summary.avg_reduction_pct[v]) << "\n";
    return out.str();
}

}  // namespace mivkit
