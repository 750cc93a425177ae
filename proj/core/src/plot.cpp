#include "semiclassica/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace semiclassica {

namespace {

// compact viridis-like table, linearly interpolated
const unsigned char kColors[][3] = {
    {68, 1, 84},   {71, 19, 101},  {72, 36, 117},  {70, 52, 128},  {65, 68, 135},
    {59, 82, 139}, {53, 95, 141},  {47, 108, 142}, {42, 120, 142}, {37, 132, 142},
    {33, 145, 140}, {30, 156, 137}, {34, 168, 132}, {47, 180, 124}, {68, 191, 112},
    {94, 201, 98}, {122, 209, 81}, {155, 217, 60}, {189, 223, 38}, {223, 227, 24},
    {253, 231, 37}};
const int kColorCount = sizeof(kColors) / sizeof(kColors[0]);

void color_of(double u, unsigned char* rgb) {
  u = std::clamp(u, 0.0, 1.0);
  double x = u * (kColorCount - 1);
  int i = std::min(static_cast<int>(x), kColorCount - 2);
  double f = x - i;
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<unsigned char>(std::lround((1 - f) * kColors[i][c] + f * kColors[i + 1][c]));
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

void emit_husimi_svg(const HusimiField& field, const std::string& path, int width_px) {
  const PhaseGrid& pg = field.pg;
  if (pg.total() == 0) throw ConfigError("emit_husimi_svg: empty field");
  // cells: n=1 -> (q, p) grid; n=2 -> (q1, q2) marginal (summed over p)
  int nx, ny;
  std::vector<double> density;
  double xlo, xstep, ylo, ystep;
  if (pg.dim == 1) {
    nx = pg.axes[0].count;
    ny = pg.axes[1].count;
    density.assign(static_cast<std::size_t>(nx) * ny, 0.0);
    for (std::int64_t m = 0; m < pg.total(); ++m) {
      int iq = static_cast<int>(m / ny), ip = static_cast<int>(m % ny);
      density[static_cast<std::size_t>(iq) * ny + ip] = std::norm(field.v[m]);
    }
    xlo = pg.axes[0].lo;
    xstep = pg.axes[0].step;
    ylo = pg.axes[1].lo;
    ystep = pg.axes[1].step;
  } else {
    nx = pg.axes[0].count;
    ny = pg.axes[1].count;
    density.assign(static_cast<std::size_t>(nx) * ny, 0.0);
    std::int64_t np = static_cast<std::int64_t>(pg.axes[2].count) * pg.axes[3].count;
    for (std::int64_t m = 0; m < pg.total(); ++m) {
      std::int64_t iq = m / np;
      int i0 = static_cast<int>(iq / ny), i1 = static_cast<int>(iq % ny);
      density[static_cast<std::size_t>(i0) * ny + i1] += std::norm(field.v[m]);
    }
    xlo = pg.axes[0].lo;
    xstep = pg.axes[0].step;
    ylo = pg.axes[1].lo;
    ystep = pg.axes[1].step;
  }
  double dmax = 0;
  for (double d : density) dmax = std::max(dmax, d);
  if (dmax <= 0) dmax = 1;

  const double cell = static_cast<double>(width_px) / nx;
  const int height_px = static_cast<int>(std::lround(cell * ny));
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_px << "\" height=\""
    << height_px << "\" viewBox=\"0 0 " << width_px << " " << height_px << "\">\n";
  f << "<!-- extent q:[" << fmt(xlo) << "," << fmt(xlo + nx * xstep) << "] y:[" << fmt(ylo) << ","
    << fmt(ylo + ny * ystep) << "] max " << fmt(dmax) << " -->\n";
  char rect[256];
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      unsigned char rgb[3];
      color_of(density[static_cast<std::size_t>(i) * ny + j] / dmax, rgb);
      // y axis points up: flip j
      std::snprintf(rect, sizeof rect,
                    "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"#%02x%02x%02x\"/>\n",
                    i * cell, (ny - 1 - j) * cell, cell + 0.5, cell + 0.5, rgb[0], rgb[1], rgb[2]);
      f << rect;
    }
  f << "</svg>\n";
}

void emit_sweep_svg(const SweepResult& sweep, const std::string& path, int width_px) {
  if (sweep.rows.empty()) throw ConfigError("emit_sweep_svg: empty sweep");
  std::vector<int> cols;
  for (std::size_t c = 0; c < sweep.columns.size(); ++c)
    if (sweep.columns[c].find("defect") != std::string::npos) cols.push_back(static_cast<int>(c));
  if (cols.empty())
    for (std::size_t c = 0; c < sweep.columns.size(); ++c) cols.push_back(static_cast<int>(c));

  const int H = width_px * 3 / 4;
  const int margin = 40;
  double vmin = 1e300, vmax = 0;
  for (const auto& r : sweep.rows)
    for (int c : cols) {
      double v = std::max(std::abs(r[c]), 1e-16);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  if (vmin >= vmax) vmin = vmax / 10;
  double lmin = std::log10(vmin), lmax = std::log10(vmax);
  double hmin = sweep.hbars.back(), hmax = sweep.hbars.front();
  double lhmin = std::log10(hmin), lhmax = std::log10(hmax);

  auto xpix = [&](double hbar) {
    return margin + (std::log10(hbar) - lhmin) / std::max(lhmax - lhmin, 1e-12) *
                        (width_px - 2 * margin);
  };
  auto ypix = [&](double v) {
    double lv = std::log10(std::max(std::abs(v), 1e-16));
    return H - margin - (lv - lmin) / std::max(lmax - lmin, 1e-12) * (H - 2 * margin);
  };

  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_px << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << width_px << " " << H << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  f << "<text x=\"" << margin << "\" y=\"16\" font-size=\"12\">" << sweep.experiment
    << " (log-log, defect vs hbar)</text>\n";
  // axes
  f << "<line x1=\"" << margin << "\" y1=\"" << H - margin << "\" x2=\"" << width_px - margin
    << "\" y2=\"" << H - margin << "\" stroke=\"black\"/>\n";
  f << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
    << H - margin << "\" stroke=\"black\"/>\n";
  const char* palette[] = {"#4477aa", "#ee6677", "#228833", "#ccbb44",
                           "#66ccee", "#aa3377", "#bbbbbb"};
  int pi = 0;
  for (int c : cols) {
    f << "<polyline fill=\"none\" stroke=\"" << palette[pi % 7] << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < sweep.hbars.size(); ++i)
      f << fmt(xpix(sweep.hbars[i])) << "," << fmt(ypix(sweep.rows[i][c])) << " ";
    f << "\"/>\n";
    f << "<text x=\"" << width_px - margin + 4 << "\" y=\""
      << fmt(ypix(sweep.rows.back()[c])) << "\" font-size=\"9\" fill=\"" << palette[pi % 7]
      << "\">" << sweep.columns[c] << "</text>\n";
    ++pi;
  }
  f << "</svg>\n";
}

}  // namespace semiclassica
