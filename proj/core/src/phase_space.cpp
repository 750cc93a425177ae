#include "semiclassica/phase_space.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace semiclassica {

double distance(const PhasePoint& a, const PhasePoint& b) {
  double s = 0;
  for (int i = 0; i < a.dim; ++i) {
    double dq = a.q[i] - b.q[i], dp = a.p[i] - b.p[i];
    s += dq * dq + dp * dp;
  }
  return std::sqrt(s);
}

Complex eval_symbol(const Symbol& f, const PhasePoint& sigma) {
  if (f.dim != sigma.dim)
    throw ConfigError("eval_symbol: dimension mismatch (symbol n=" + std::to_string(f.dim) +
                      ", point n=" + std::to_string(sigma.dim) + ")");
  return f.eval(sigma);
}

void symbol_gradient(const Symbol& f, const PhasePoint& sigma, Complex* dq, Complex* dp) {
  if (f.grad) {
    f.grad(sigma, dq, dp);
    return;
  }
  // Central differences, relative step 1e-5 * (1 + |sigma|).
  const double h = 1e-5 * (1.0 + std::sqrt(sigma.norm2()));
  PhasePoint s = sigma;
  for (int a = 0; a < f.dim; ++a) {
    s.q[a] = sigma.q[a] + h;
    Complex fp = f.eval(s);
    s.q[a] = sigma.q[a] - h;
    Complex fm = f.eval(s);
    s.q[a] = sigma.q[a];
    dq[a] = (fp - fm) / (2 * h);
    s.p[a] = sigma.p[a] + h;
    fp = f.eval(s);
    s.p[a] = sigma.p[a] - h;
    fm = f.eval(s);
    s.p[a] = sigma.p[a];
    dp[a] = (fp - fm) / (2 * h);
  }
}

Complex poisson_bracket(const Symbol& f, const Symbol& g, const PhasePoint& sigma) {
  if (f.dim != g.dim || f.dim != sigma.dim)
    throw ConfigError("poisson_bracket: dimension mismatch");
  Complex fq[2], fp[2], gq[2], gp[2];
  symbol_gradient(f, sigma, fq, fp);
  symbol_gradient(g, sigma, gq, gp);
  Complex acc = 0;
  for (int k = 0; k < f.dim; ++k) acc += fp[k] * gq[k] - gp[k] * fq[k];
  return acc;
}

// --- potentials ----------------------------------------------------------

Potential make_double_well() {
  Potential V;
  V.dim = 1;
  V.name = "doublewell";
  V.value = [](const double* q) {
    double u = q[0] * q[0] - 1.0;
    return u * u;
  };
  V.gradient = [](const double* q, double* g) { g[0] = 4.0 * q[0] * (q[0] * q[0] - 1.0); };
  V.min_value = 0.0;
  V.minimizers = {PhasePoint::make1(1.0, 0.0), PhasePoint::make1(-1.0, 0.0)};
  V.symmetry = SymmetryTag::Z2;
  return V;
}

Potential make_mexican_hat() {
  Potential V;
  V.dim = 2;
  V.name = "mexicanhat";
  V.value = [](const double* q) {
    double u = q[0] * q[0] + q[1] * q[1] - 1.0;
    return u * u;
  };
  V.gradient = [](const double* q, double* g) {
    double u = q[0] * q[0] + q[1] * q[1] - 1.0;
    g[0] = 4.0 * q[0] * u;
    g[1] = 4.0 * q[1] * u;
  };
  V.min_value = 0.0;
  V.minimizers = {PhasePoint::make2(1.0, 0.0, 0.0, 0.0)};
  V.symmetry = SymmetryTag::SO2;
  return V;
}

Potential make_harmonic(int dim) {
  Potential V;
  V.dim = dim;
  V.name = "harmonic";
  V.value = [dim](const double* q) {
    double s = 0;
    for (int a = 0; a < dim; ++a) s += q[a] * q[a];
    return s;
  };
  V.gradient = [dim](const double* q, double* g) {
    for (int a = 0; a < dim; ++a) g[a] = 2.0 * q[a];
  };
  V.min_value = 0.0;
  V.minimizers = {dim == 1 ? PhasePoint::make1(0, 0) : PhasePoint::make2(0, 0, 0, 0)};
  V.symmetry = SymmetryTag::None;
  return V;
}

Potential make_polynomial_potential(int dim, const std::vector<double>& coeffs) {
  if (coeffs.empty()) throw ConfigError("polynomial potential needs at least one coefficient");
  Potential V;
  V.dim = dim;
  V.name = "polynomial";
  auto poly = [coeffs](double u) {
    double acc = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * u + coeffs[i];
    return acc;
  };
  auto dpoly = [coeffs](double u) {
    double acc = 0;
    for (std::size_t i = coeffs.size(); i-- > 1;) acc = acc * u + coeffs[i] * static_cast<double>(i);
    return acc;
  };
  if (dim == 1) {
    V.value = [poly](const double* q) { return poly(q[0]); };
    V.gradient = [dpoly](const double* q, double* g) { g[0] = dpoly(q[0]); };
  } else {
    // radial: coefficients in r^2 = |q|^2
    V.value = [poly](const double* q) { return poly(q[0] * q[0] + q[1] * q[1]); };
    V.gradient = [dpoly](const double* q, double* g) {
      double r2 = q[0] * q[0] + q[1] * q[1];
      double d = dpoly(r2);
      g[0] = 2.0 * q[0] * d;
      g[1] = 2.0 * q[1] * d;
    };
  }
  // Locate the minimum numerically on a coarse 1d scan plus refinement.
  double best_u = 0, best_v = V.value(std::array<double, 2>{0, 0}.data());
  for (int i = 0; i <= 4000; ++i) {
    double u = -10.0 + i * 20.0 / 4000.0;
    std::array<double, 2> qq{u, 0};
    double v = V.value(qq.data());
    if (v < best_v) {
      best_v = v;
      best_u = u;
    }
  }
  V.min_value = best_v;
  V.minimizers = {dim == 1 ? PhasePoint::make1(best_u, 0)
                           : PhasePoint::make2(best_u, 0, 0, 0)};
  V.symmetry = SymmetryTag::None;
  return V;
}

Potential potential_by_name(const std::string& name, int dim) {
  if (name == "doublewell") return make_double_well();
  if (name == "mexicanhat") return make_mexican_hat();
  if (name == "harmonic") return make_harmonic(dim);
  throw ConfigError("unknown potential: " + name);
}

// --- symbols -------------------------------------------------------------

Symbol gibbs_symbol(const Potential& V, double t) {
  if (!(t > 0)) throw ConfigError("gibbs_symbol: t must be positive");
  Symbol e;
  e.dim = V.dim;
  e.decay = DecayClass::Schwartz;
  const int n = V.dim;
  auto value = V.value;
  auto gradV = V.gradient;
  e.eval = [value, t, n](const PhasePoint& s) -> Complex {
    double p2 = 0;
    for (int a = 0; a < n; ++a) p2 += s.p[a] * s.p[a];
    return std::exp(-t * (p2 + value(s.q.data())));
  };
  e.grad = [value, gradV, t, n](const PhasePoint& s, Complex* dq, Complex* dp) {
    double p2 = 0;
    for (int a = 0; a < n; ++a) p2 += s.p[a] * s.p[a];
    double ev = std::exp(-t * (p2 + value(s.q.data())));
    double gv[2];
    gradV(s.q.data(), gv);
    for (int a = 0; a < n; ++a) {
      dq[a] = -t * gv[a] * ev;
      dp[a] = -2.0 * t * s.p[a] * ev;
    }
  };
  e.q_factor = [value, t](const double* q) -> Complex { return std::exp(-t * value(q)); };
  e.p_factor = [t, n](const double* p) -> Complex {
    double p2 = 0;
    for (int a = 0; a < n; ++a) p2 += p[a] * p[a];
    return std::exp(-t * p2);
  };
  return e;
}

Symbol hamiltonian_symbol(const Potential& V) {
  Symbol h;
  h.dim = V.dim;
  h.decay = DecayClass::BoundedContinuous;
  const int n = V.dim;
  auto value = V.value;
  auto gradV = V.gradient;
  h.eval = [value, n](const PhasePoint& s) -> Complex {
    double p2 = 0;
    for (int a = 0; a < n; ++a) p2 += s.p[a] * s.p[a];
    return p2 + value(s.q.data());
  };
  h.grad = [gradV, n](const PhasePoint& s, Complex* dq, Complex* dp) {
    double gv[2];
    gradV(s.q.data(), gv);
    for (int a = 0; a < n; ++a) {
      dq[a] = gv[a];
      dp[a] = 2.0 * s.p[a];
    }
  };
  return h;
}

// --- critical set --------------------------------------------------------

namespace {

// Real gradient of a real-valued symbol packed as (dq, dp).
Eigen::VectorXd real_grad(const Symbol& h, const PhasePoint& s) {
  Complex dq[2], dp[2];
  symbol_gradient(h, s, dq, dp);
  Eigen::VectorXd g(2 * h.dim);
  for (int a = 0; a < h.dim; ++a) {
    g[a] = dq[a].real();
    g[h.dim + a] = dp[a].real();
  }
  return g;
}

PhasePoint shifted(const PhasePoint& s, const Eigen::VectorXd& d) {
  PhasePoint r = s;
  for (int a = 0; a < s.dim; ++a) {
    r.q[a] += d[a];
    r.p[a] += d[s.dim + a];
  }
  return r;
}

}  // namespace

CriticalSet critical_set(const Symbol& h, const SearchBox& box, int seed_res) {
  const int n = h.dim;
  const int m = 2 * n;
  CriticalSet out;
  std::vector<PhasePoint> seeds;
  auto axis_seeds = [&](double lo, double hi) {
    std::vector<double> v;
    for (int i = 0; i < seed_res; ++i) v.push_back(lo + (i + 0.5) * (hi - lo) / seed_res);
    return v;
  };
  auto qs0 = axis_seeds(box.q_lo[0], box.q_hi[0]);
  auto ps0 = axis_seeds(box.p_lo[0], box.p_hi[0]);
  if (n == 1) {
    for (double q : qs0)
      for (double p : ps0) seeds.push_back(PhasePoint::make1(q, p));
  } else {
    auto qs1 = axis_seeds(box.q_lo[1], box.q_hi[1]);
    auto ps1 = axis_seeds(box.p_lo[1], box.p_hi[1]);
    for (double q0 : qs0)
      for (double q1 : qs1)
        for (double p0 : ps0)
          for (double p1 : ps1) seeds.push_back(PhasePoint::make2(q0, q1, p0, p1));
  }

  const double fd = 1e-6;
  bool any_converged = false;
  for (const auto& seed : seeds) {
    PhasePoint x = seed;
    double lambda = 1e-8;  // Levenberg damping handles the degenerate orbit directions
    bool ok = false;
    for (int it = 0; it < 80; ++it) {
      Eigen::VectorXd g = real_grad(h, x);
      if (g.norm() < 1e-12) {
        ok = true;
        break;
      }
      // Finite-difference Hessian of h (Jacobian of the gradient).
      Eigen::MatrixXd H(m, m);
      for (int j = 0; j < m; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
        e[j] = fd;
        Eigen::VectorXd gp = real_grad(h, shifted(x, e));
        Eigen::VectorXd gm = real_grad(h, shifted(x, -e));
        H.col(j) = (gp - gm) / (2 * fd);
      }
      H = 0.5 * (H + H.transpose());
      Eigen::VectorXd step =
          (H + lambda * Eigen::MatrixXd::Identity(m, m)).ldlt().solve(-g);
      PhasePoint xn = shifted(x, step);
      if (real_grad(h, xn).norm() < g.norm()) {
        x = xn;
        lambda = std::max(lambda * 0.3, 1e-12);
      } else {
        lambda *= 10;
        if (lambda > 1e6) break;
      }
    }
    if (!ok && real_grad(h, x).norm() < 1e-10) ok = true;
    if (!ok) continue;
    if (real_grad(h, x).norm() >= 1e-10) continue;
    any_converged = true;
    bool dup = false;
    for (const auto& y : out.points)
      if (distance(x, y) < 1e-6) {
        dup = true;
        break;
      }
    if (!dup) out.points.push_back(x);
  }
  out.converged = any_converged;
  return out;
}

// --- flow ----------------------------------------------------------------

Trajectory flow(const Potential& V, const PhasePoint& sigma0, double T, double dt) {
  if (!(dt > 0)) throw ConfigError("flow: dt must be positive");
  const int n = V.dim;
  const int substeps = 32;
  const double h = dt / substeps;
  Symbol hsym = hamiltonian_symbol(V);

  Trajectory tr;
  PhasePoint x = sigma0;
  auto record = [&](double t) {
    tr.times.push_back(t);
    tr.points.push_back(x);
    tr.energies.push_back(hsym.eval(x).real());
  };
  record(0.0);
  const long nsamples = static_cast<long>(std::ceil(T / dt - 1e-12));
  double g[2];
  for (long s = 1; s <= nsamples; ++s) {
    for (int k = 0; k < substeps; ++k) {
      // kick-drift-kick for h = p^2 + V: qdot = 2p, pdot = -grad V
      V.gradient(x.q.data(), g);
      for (int a = 0; a < n; ++a) x.p[a] -= 0.5 * h * g[a];
      for (int a = 0; a < n; ++a) x.q[a] += h * 2.0 * x.p[a];
      V.gradient(x.q.data(), g);
      for (int a = 0; a < n; ++a) x.p[a] -= 0.5 * h * g[a];
    }
    record(s * dt);
  }
  return tr;
}

// --- observables ---------------------------------------------------------

Symbol make_gaussian_bump(const PhasePoint& center, double width) {
  if (!(width > 0)) throw ConfigError("gaussian bump: width must be positive");
  Symbol f;
  f.dim = center.dim;
  f.decay = DecayClass::Schwartz;
  const int n = center.dim;
  const PhasePoint c = center;
  const double w = width;
  f.eval = [c, w, n](const PhasePoint& s) -> Complex {
    double r2 = 0;
    for (int a = 0; a < n; ++a) {
      double dq = s.q[a] - c.q[a], dp = s.p[a] - c.p[a];
      r2 += dq * dq + dp * dp;
    }
    return std::exp(-r2 / (2 * w));
  };
  f.grad = [c, w, n](const PhasePoint& s, Complex* dq, Complex* dp) {
    double r2 = 0;
    for (int a = 0; a < n; ++a) {
      double ddq = s.q[a] - c.q[a], ddp = s.p[a] - c.p[a];
      r2 += ddq * ddq + ddp * ddp;
    }
    double v = std::exp(-r2 / (2 * w));
    for (int a = 0; a < n; ++a) {
      dq[a] = -(s.q[a] - c.q[a]) / w * v;
      dp[a] = -(s.p[a] - c.p[a]) / w * v;
    }
  };
  f.q_factor = [c, w, n](const double* q) -> Complex {
    double r2 = 0;
    for (int a = 0; a < n; ++a) r2 += (q[a] - c.q[a]) * (q[a] - c.q[a]);
    return std::exp(-r2 / (2 * w));
  };
  f.p_factor = [c, w, n](const double* p) -> Complex {
    double r2 = 0;
    for (int a = 0; a < n; ++a) r2 += (p[a] - c.p[a]) * (p[a] - c.p[a]);
    return std::exp(-r2 / (2 * w));
  };
  f.support_radius = std::sqrt(2 * w * 23.03) + 0.5;  // |f| < 1e-10 outside
  f.support_center = center;
  return f;
}

namespace {

// poly(sigma) * gaussian cutoff, with poly and its gradient supplied.
Symbol poly_with_cutoff(int dim, std::function<double(const PhasePoint&)> poly,
                        std::function<void(const PhasePoint&, double*, double*)> dpoly,
                        const PhasePoint& center, double cw) {
  Symbol f;
  f.dim = dim;
  f.decay = DecayClass::Schwartz;
  Symbol cut = make_gaussian_bump(center, cw);
  auto cuteval = cut.eval;
  auto cutgrad = cut.grad;
  f.eval = [poly, cuteval](const PhasePoint& s) -> Complex { return poly(s) * cuteval(s); };
  f.grad = [poly, dpoly, cuteval, cutgrad, dim](const PhasePoint& s, Complex* dq, Complex* dp) {
    double pq[2], pp[2];
    dpoly(s, pq, pp);
    Complex cq[2], cp[2];
    cutgrad(s, cq, cp);
    Complex cv = cuteval(s);
    double pv = poly(s);
    for (int a = 0; a < dim; ++a) {
      dq[a] = pq[a] * cv + pv * cq[a];
      dp[a] = pp[a] * cv + pv * cp[a];
    }
  };
  f.support_radius = std::sqrt(2 * cw * 28.0) + 1.0;
  f.support_center = center;
  return f;
}

}  // namespace

Symbol make_coordinate_with_cutoff(int dim, int index, const PhasePoint& center,
                                   double cutoff_width) {
  if (index < 0 || index >= 2 * dim) throw ConfigError("coordinate index out of range");
  auto poly = [index, dim](const PhasePoint& s) {
    return index < dim ? s.q[index] : s.p[index - dim];
  };
  auto dpoly = [index, dim](const PhasePoint&, double* dq, double* dp) {
    for (int a = 0; a < dim; ++a) dq[a] = dp[a] = 0;
    if (index < dim)
      dq[index] = 1;
    else
      dp[index - dim] = 1;
  };
  Symbol f = poly_with_cutoff(dim, poly, dpoly, center, cutoff_width);
  // q * gaussian is still separable in (q, p)
  Symbol cut = make_gaussian_bump(center, cutoff_width);
  if (index < dim) {
    auto qf = cut.q_factor;
    f.q_factor = [qf, index](const double* q) -> Complex { return q[index] * qf(q); };
    f.p_factor = cut.p_factor;
  } else {
    f.q_factor = cut.q_factor;
    auto pf = cut.p_factor;
    int pidx = index - dim;
    f.p_factor = [pf, pidx](const double* p) -> Complex { return p[pidx] * pf(p); };
  }
  return f;
}

Symbol make_qsquared_with_cutoff(int dim, int axis, const PhasePoint& center,
                                 double cutoff_width) {
  if (axis < 0 || axis >= dim) throw ConfigError("axis out of range");
  auto poly = [axis](const PhasePoint& s) { return s.q[axis] * s.q[axis]; };
  auto dpoly = [axis, dim](const PhasePoint& s, double* dq, double* dp) {
    for (int a = 0; a < dim; ++a) dq[a] = dp[a] = 0;
    dq[axis] = 2 * s.q[axis];
  };
  Symbol f = poly_with_cutoff(dim, poly, dpoly, center, cutoff_width);
  Symbol cut = make_gaussian_bump(center, cutoff_width);
  auto qf = cut.q_factor;
  f.q_factor = [qf, axis](const double* q) -> Complex { return q[axis] * q[axis] * qf(q); };
  f.p_factor = cut.p_factor;
  return f;
}

}  // namespace semiclassica
