#include "semiclassica/symmetry.hpp"

#include <cmath>

namespace semiclassica {

GroupElement GroupElement::inverse() const {
  GroupElement inv = *this;
  if (kind == GroupKind::SO2) {
    inv.theta = theta == 0.0 ? 0.0 : 2 * kPi - theta;
  }
  return inv;  // Z2 elements are involutions
}

std::vector<GroupElement> GroupAction::generators() const {
  switch (kind) {
    case GroupKind::Trivial:
      return {GroupElement::identity(kind)};
    case GroupKind::Z2:
      return {GroupElement::z2_flip()};
    case GroupKind::SO2:
      return {GroupElement::so2_angle(kPi / 2)};
  }
  return {};
}

GroupAction group_by_name(const std::string& name) {
  if (name == "trivial" || name.empty()) return GroupAction::trivial();
  if (name == "z2") return GroupAction::z2();
  if (name == "so2") return GroupAction::so2();
  throw ConfigError("unknown group: " + name);
}

std::string group_name(const GroupAction& G) {
  switch (G.kind) {
    case GroupKind::Trivial:
      return "trivial";
    case GroupKind::Z2:
      return "z2";
    case GroupKind::SO2:
      return "so2";
  }
  return "?";
}

PhasePoint act_phase(const GroupAction& G, const GroupElement& g, const PhasePoint& sigma) {
  PhasePoint out = sigma;
  switch (G.kind) {
    case GroupKind::Trivial:
      break;
    case GroupKind::Z2:
      if (g.sign < 0)
        for (int a = 0; a < sigma.dim; ++a) {
          out.q[a] = -sigma.q[a];
          out.p[a] = -sigma.p[a];
        }
      break;
    case GroupKind::SO2: {
      if (sigma.dim != 2) throw ConfigError("SO(2) acts on n=2 phase space");
      double c = std::cos(g.theta), s = std::sin(g.theta);
      out.q[0] = c * sigma.q[0] - s * sigma.q[1];
      out.q[1] = s * sigma.q[0] + c * sigma.q[1];
      out.p[0] = c * sigma.p[0] - s * sigma.p[1];
      out.p[1] = s * sigma.p[0] + c * sigma.p[1];
      break;
    }
  }
  return out;
}

Symbol pullback_symbol(const GroupAction& G, const GroupElement& g, const Symbol& f) {
  Symbol out;
  out.dim = f.dim;
  out.decay = f.decay;
  GroupElement ginv = g.inverse();
  GroupAction Gc = G;
  Symbol base = f;
  out.eval = [Gc, ginv, base](const PhasePoint& s) { return base.eval(act_phase(Gc, ginv, s)); };
  if (f.grad) {
    out.grad = [Gc, ginv, base](const PhasePoint& s, Complex* dq, Complex* dp) {
      // chain rule through the linear action g^{-1}
      PhasePoint t = act_phase(Gc, ginv, s);
      Complex tq[2], tp[2];
      base.grad(t, tq, tp);
      if (Gc.kind == GroupKind::SO2) {
        double c = std::cos(ginv.theta), sn = std::sin(ginv.theta);
        // d/ds = (d t / d s)^T grad_t, with t = R(ginv) s
        dq[0] = c * tq[0] + sn * tq[1];
        dq[1] = -sn * tq[0] + c * tq[1];
        dp[0] = c * tp[0] + sn * tp[1];
        dp[1] = -sn * tp[0] + c * tp[1];
      } else if (Gc.kind == GroupKind::Z2 && ginv.sign < 0) {
        for (int a = 0; a < base.dim; ++a) {
          dq[a] = -tq[a];
          dp[a] = -tp[a];
        }
      } else {
        for (int a = 0; a < base.dim; ++a) {
          dq[a] = tq[a];
          dp[a] = tp[a];
        }
      }
    };
  }
  if (f.support_radius) {
    out.support_radius = f.support_radius;
    out.support_center = act_phase(G, g, f.support_center);
  }
  return out;
}

namespace {

inline int wrap(int j, int N) {
  j %= N;
  return j < 0 ? j + N : j;
}

bool is_quarter_turn(double theta) {
  double m = theta / (kPi / 2);
  return std::abs(m - std::round(m)) < 1e-12;
}

}  // namespace

WaveFunction unitary_rep(const GroupAction& G, const GroupElement& g, const WaveFunction& psi) {
  const GridSpec& gr = psi.grid;
  const int N = gr.npts;
  if (G.kind == GroupKind::Trivial || (G.kind == GroupKind::Z2 && g.sign > 0) ||
      (G.kind == GroupKind::SO2 && g.theta == 0.0))
    return psi;

  WaveFunction out = WaveFunction::zero(gr);
  if (G.kind == GroupKind::Z2) {
    // psi(-x); -x_j = x_{(N-j) mod N} on the symmetric periodic grid
    if (gr.dim == 1) {
      for (int j = 0; j < N; ++j) out.v[j] = psi.v[wrap(N - j, N)];
    } else {
      for (int j0 = 0; j0 < N; ++j0)
        for (int j1 = 0; j1 < N; ++j1)
          out.v[flat_index(gr, j0, j1)] = psi.v[flat_index(gr, wrap(N - j0, N), wrap(N - j1, N))];
    }
    return out;
  }

  if (gr.dim != 2) throw ConfigError("SO(2) representation needs n=2");
  const double th = g.theta;
  if (is_quarter_turn(th)) {
    int quarters = wrap(static_cast<int>(std::llround(th / (kPi / 2))), 4);
    // g^{-1} x for one quarter turn: (x0, x1) -> (x1, -x0)
    out = psi;
    for (int r = 0; r < quarters; ++r) {
      WaveFunction tmp = WaveFunction::zero(gr);
      for (int j0 = 0; j0 < N; ++j0)
        for (int j1 = 0; j1 < N; ++j1) {
          // (U psi)(x_{j0}, x_{j1}) = psi(x_{j1}, -x_{j0})
          tmp.v[flat_index(gr, j0, j1)] = out.v[flat_index(gr, j1, wrap(N - j0, N))];
        }
      out = tmp;
    }
    return out;
  }

  // generic angle: bilinear interpolation of psi(g^{-1} x), periodic wrap
  const double c = std::cos(-th), s = std::sin(-th);
  const double L = gr.half_width();
  for (int j0 = 0; j0 < N; ++j0) {
    double x0 = gr.node(j0);
    for (int j1 = 0; j1 < N; ++j1) {
      double x1 = gr.node(j1);
      double y0 = c * x0 - s * x1;
      double y1 = s * x0 + c * x1;
      double u0 = (y0 + L) / gr.spacing;
      double u1 = (y1 + L) / gr.spacing;
      int i0 = static_cast<int>(std::floor(u0)), i1 = static_cast<int>(std::floor(u1));
      double f0 = u0 - i0, f1 = u1 - i1;
      auto at = [&](int a, int b) { return psi.v[flat_index(gr, wrap(a, N), wrap(b, N))]; };
      out.v[flat_index(gr, j0, j1)] = (1 - f0) * (1 - f1) * at(i0, i1) +
                                      f0 * (1 - f1) * at(i0 + 1, i1) +
                                      (1 - f0) * f1 * at(i0, i1 + 1) + f0 * f1 * at(i0 + 1, i1 + 1);
    }
  }
  return out;
}

double haar_average(const GroupAction& G, const Symbol& f, const PhasePoint& sigma0) {
  switch (G.kind) {
    case GroupKind::Trivial:
      return f.eval(sigma0).real();
    case GroupKind::Z2: {
      Complex a = f.eval(sigma0);
      Complex b = f.eval(act_phase(G, GroupElement::z2_flip(), sigma0));
      return 0.5 * (a + b).real();
    }
    case GroupKind::SO2: {
      const int M = G.haar_points;
      Complex acc = 0;
      for (int i = 0; i < M; ++i) {
        double th = 2 * kPi * i / M;
        acc += f.eval(act_phase(G, GroupElement::so2_angle(th), sigma0));
      }
      return (acc / static_cast<double>(M)).real();
    }
  }
  return 0;
}

Symbol haar_symbol(const GroupAction& G, const Symbol& f) {
  Symbol out;
  out.dim = f.dim;
  out.decay = f.decay;
  GroupAction Gc = G;
  Symbol base = f;
  out.eval = [Gc, base](const PhasePoint& s) -> Complex {
    switch (Gc.kind) {
      case GroupKind::Trivial:
        return base.eval(s);
      case GroupKind::Z2:
        return 0.5 * (base.eval(s) + base.eval(act_phase(Gc, GroupElement::z2_flip(), s)));
      case GroupKind::SO2: {
        Complex acc = 0;
        for (int i = 0; i < Gc.haar_points; ++i)
          acc += base.eval(act_phase(Gc, GroupElement::so2_angle(2 * kPi * i / Gc.haar_points), s));
        return acc / static_cast<double>(Gc.haar_points);
      }
    }
    return Complex(0);
  };
  if (f.support_radius) {
    out.support_radius = *f.support_radius + std::sqrt(f.support_center.norm2());
    out.support_center = PhasePoint{f.dim, {0, 0}, {0, 0}};
  }
  return out;
}

double equivariance_defect(const GroupAction& G, const GroupElement& g, const Symbol& f,
                           double hbar, const GridSpec& grid, const PhaseGrid& pg,
                           const std::vector<WaveFunction>& probes) {
  if (G.kind == GroupKind::Trivial) return 0.0;
  BerezinOperator Qf = berezin_dense(f, hbar, grid, pg, /*check_coverage=*/false);
  Symbol zf = pullback_symbol(G, g, f);
  BerezinOperator Qzf = berezin_dense(zf, hbar, grid, pg, /*check_coverage=*/false);
  GroupElement ginv = g.inverse();
  double best = 0;
  for (const auto& psi : probes) {
    WaveFunction lhs = unitary_rep(G, g, Qf.apply(unitary_rep(G, ginv, psi)));
    WaveFunction rhs = Qzf.apply(psi);
    double diff2 = 0;
    for (std::size_t i = 0; i < lhs.v.size(); ++i) diff2 += std::norm(lhs.v[i] - rhs.v[i]);
    double d = std::sqrt(diff2 * grid.cell_volume()) / norm(psi);
    best = std::max(best, d);
  }
  return best;
}

}  // namespace semiclassica
