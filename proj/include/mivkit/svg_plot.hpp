#pragma once

#include <string>
#include <vector>

#include "mivkit/curves.hpp"
#include "mivkit/ppa.hpp"

namespace mivkit {

// Self-contained SVG with the reference curve and the fitted model curve
// overlaid. Log scale suppresses non-positive samples; the count of
// suppressed points is returned and recorded as an `omitted-nonpositive`
// comment in the file. Coordinates are quantized to 0.01 px so identical
// inputs produce identical path text.
std::string curve_overlay_svg(const DeviceCurve& reference, const DeviceCurve& fitted,
                              const std::string& title, bool log_y, int* suppressed = nullptr);

// One overlay per curve (log and linear for the IDVG kinds); returns the
// file names written into out_dir.
std::vector<std::string> write_curve_plots(const CharacterizationSet& reference,
                                           const ModelParams& fitted, const ModelConstants& consts,
                                           const std::string& out_dir);

// Grouped bar chart, one group per cell and one bar per variant.
enum class PpaMetric { delay, power, area };
std::string ppa_bar_svg(const PpaReport& report, PpaMetric metric);

std::vector<std::string> write_ppa_plots(const PpaReport& report, const std::string& out_dir);

}  // namespace mivkit
