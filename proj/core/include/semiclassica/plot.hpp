#pragma once

#include <string>

#include "semiclassica/coherent.hpp"
#include "semiclassica/limits.hpp"

namespace semiclassica {

// Self-contained SVG heatmap of a Husimi density (n=1: the (q,p) plane;
// n=2: the (q1,q2) marginal). Fixed viridis-like color table, linear scale,
// byte-stable output for identical input.
void emit_husimi_svg(const HusimiField& field, const std::string& path, int width_px = 640);

// log-y defect curves of every column whose name contains "defect" (or all
// value columns when none do).
void emit_sweep_svg(const SweepResult& sweep, const std::string& path, int width_px = 640);

}  // namespace semiclassica
