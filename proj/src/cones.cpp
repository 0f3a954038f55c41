#include "conewalk/cones.hpp"

#include "conewalk/koperator.hpp"

#include <Eigen/SparseCore>

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace conewalk {

double ConeSpec::remainder_at(const SamplePoint& x) const {
  if (remainder_fn) {
    return remainder_fn(x);
  }
  if (remainder.empty()) {
    throw ParameterError("cone '" + label + "' has no remainder");
  }
  return remainder(x);
}

ConeSpec make_cone(ConeKind kind, FeFunction vertex, double p, std::string label) {
  ConeSpec c;
  c.kind = kind;
  c.vertex = std::move(vertex);
  c.p = p;
  c.label = std::move(label);
  return c;
}

double cone_distance(const FeFunction& u, const ConeSpec& cone) {
  FeFunction part(u.mesh_ptr());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - cone.vertex[i];
    part[i] = cone.is_sub() ? std::max(-d, 0.0) : std::max(d, 0.0);
  }
  return w1p_norm(part, cone.p);
}

FeFunction project_plus(const FeFunction& u, const ConeSpec& cone) {
  FeFunction w = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.mesh().is_boundary(i)) {
      continue;  // cone elements stay in W_0
    }
    w[i] = cone.is_sub() ? std::max(u[i], cone.vertex[i]) : std::min(u[i], cone.vertex[i]);
  }
  return w;
}

std::pair<FeFunction, double> exact_projection_p2(const FeFunction& u, const ConeSpec& cone,
                                                  double tol, int max_sweeps) {
  if (cone.p != 2.0) {
    throw ParameterError("exact projection is only available for p = 2");
  }
  const Mesh& mesh = u.mesh();
  const Eigen::SparseMatrix<double> K = [&] {
    Eigen::SparseMatrix<double> A = mesh.pattern().skeleton;
    std::vector<double> vals(static_cast<std::size_t>(A.nonZeros()), 0.0);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
      const Element& el = mesh.element(e);
      for (int a = 0; a < mesh.nodes_per_element(); ++a) {
        for (int b = 0; b < mesh.nodes_per_element(); ++b) {
          const int slot = mesh.pattern().slot[e][a * 3 + b];
          if (slot >= 0) {
            vals[slot] += el.volume * (el.grad[a][0] * el.grad[b][0] + el.grad[a][1] * el.grad[b][1]);
          }
        }
      }
    }
    std::copy(vals.begin(), vals.end(), A.valuePtr());
    return A;
  }();
  // Minimize |grad(w - u)|^2 over interior w subject to the nodal obstacle.
  const Eigen::VectorXd ui = gather_interior(mesh, u.values());
  const Eigen::VectorXd obstacle = gather_interior(mesh, cone.vertex.values());
  const Eigen::VectorXd rhs = K * ui;
  Eigen::VectorXd w = ui;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w[i] = cone.is_sub() ? std::max(w[i], obstacle[i]) : std::min(w[i], obstacle[i]);
  }
  const double omega = 1.8;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (Eigen::Index i = 0; i < K.outerSize(); ++i) {
      double diag = 0.0;
      double off = 0.0;
      for (Eigen::SparseMatrix<double>::InnerIterator it(K, i); it; ++it) {
        if (it.row() == i) {
          diag = it.value();
        } else {
          off += it.value() * w[it.row()];
        }
      }
      const double gs = (rhs[i] - off) / diag;
      double wi = w[i] + omega * (gs - w[i]);
      wi = cone.is_sub() ? std::max(wi, obstacle[i]) : std::min(wi, obstacle[i]);
      change = std::max(change, std::abs(wi - w[i]));
      w[i] = wi;
    }
    if (change <= tol * (1.0 + w.lpNorm<Eigen::Infinity>())) {
      break;
    }
  }
  FeFunction proj(u.mesh_ptr());
  scatter_interior(mesh, w, proj.values());
  return {proj, w1p_norm(proj - u, 2.0)};
}

double metric_distance(const FeFunction& u, const ConeSpec& cone, double target, double tol,
                       int max_sweeps) {
  const Mesh& mesh = u.mesh();
  const double p = cone.p;
  const int npe = mesh.nodes_per_element();
  const auto offsets = mesh.adjacency_offsets();
  const auto adj_el = mesh.adjacency_elements();
  const auto adj_loc = mesh.adjacency_locals();
  const double sgn = cone.is_sub() ? 1.0 : -1.0;
  // z = w - u with sgn * z >= sgn * (vertex - u) at interior nodes, z = 0 on the boundary.
  std::vector<double> obstacle(u.size(), 0.0);
  FeFunction z(u.mesh_ptr());
  for (int i : mesh.interior_nodes()) {
    obstacle[i] = cone.vertex[i] - u[i];
    z[i] = sgn * std::max(sgn * obstacle[i], 0.0);
  }
  const auto grad_of = [&](std::size_t e, int skip) {
    const Element& el = mesh.element(e);
    std::array<double, 2> g{0.0, 0.0};
    for (int b = 0; b < npe; ++b) {
      if (b != skip) {
        g[0] += z[el.nodes[b]] * el.grad[b][0];
        g[1] += z[el.nodes[b]] * el.grad[b][1];
      }
    }
    return g;
  };
  struct Piece {
    double vol;
    std::array<double, 2> g0;  // gradient without node i
    std::array<double, 2> gi;  // hat gradient of node i
  };
  std::vector<Piece> pieces;
  const auto local = [&](double t, double& value, double& slope) {
    value = 0.0;
    slope = 0.0;
    for (const Piece& pc : pieces) {
      const double gx = pc.g0[0] + t * pc.gi[0];
      const double gy = pc.g0[1] + t * pc.gi[1];
      const double n2 = gx * gx + gy * gy;
      const double np = std::pow(n2, 0.5 * p);
      value += pc.vol * np / p;
      if (n2 > 0.0) {
        slope += pc.vol * np / n2 * (gx * pc.gi[0] + gy * pc.gi[1]);
      }
    }
  };
  const double omega = 1.8;
  double dist = w1p_norm(z, p);
  for (int sweep = 0; sweep < max_sweeps && dist > target; ++sweep) {
    double change = 0.0;
    for (int i : mesh.interior_nodes()) {
      pieces.clear();
      for (int k = offsets[i]; k < offsets[i + 1]; ++k) {
        const std::size_t e = static_cast<std::size_t>(adj_el[k]);
        const int a = adj_loc[k];
        const Element& el = mesh.element(e);
        pieces.push_back({el.volume, grad_of(e, a), {el.grad[a][0], el.grad[a][1]}});
      }
      const double zi = z[i];
      const double ob = obstacle[i];
      double v0 = 0.0;
      double s0 = 0.0;
      local(ob, v0, s0);
      double best = ob;
      // The local energy is convex in t; its minimizer over the feasible side
      // is the obstacle unless the slope there points inward.
      if (sgn * s0 < 0.0) {
        double lo = ob;
        double step = std::max({std::abs(zi - ob), std::abs(ob), 1e-300}) + 1e-12;
        double hi = ob + sgn * step;
        double vh = 0.0;
        double sh = 0.0;
        local(hi, vh, sh);
        for (int k = 0; k < 200 && sgn * sh < 0.0; ++k) {
          lo = hi;
          step *= 2.0;
          hi = ob + sgn * step;
          local(hi, vh, sh);
        }
        const auto slope_at = [&](double t) {
          double v = 0.0;
          double s = 0.0;
          local(t, v, s);
          return s;
        };
        boost::uintmax_t iters = 100;
        const auto root = boost::math::tools::toms748_solve(
            slope_at, std::min(lo, hi), std::max(lo, hi),
            boost::math::tools::eps_tolerance<double>(50), iters);
        best = 0.5 * (root.first + root.second);
      }
      double t = zi + omega * (best - zi);
      if (sgn * (t - ob) < 0.0) {
        t = ob;
      }
      double vt = 0.0;
      double vb = 0.0;
      double dummy = 0.0;
      local(t, vt, dummy);
      local(best, vb, dummy);
      if (vt > vb) {
        t = best;  // over-relaxation overshot
      }
      change = std::max(change, std::abs(t - zi));
      z[i] = t;
    }
    dist = w1p_norm(z, p);
    if (change <= tol * (1.0 + z.sup_norm())) {
      break;
    }
  }
  return dist;
}

StrictReport verify_strict(const ConeSpec& cone, const NonlinearitySpec& spec) {
  const Mesh& mesh = cone.vertex.mesh();
  const Residual r = residual(cone.vertex, spec);
  const auto mass = mesh.lumped_mass();
  StrictReport rep;
  rep.recovered = FeFunction(cone.vertex.mesh_ptr());
  std::vector<double> vals;
  for (int i : mesh.interior_nodes()) {
    const double v = (cone.is_sub() ? -r.values[i] : r.values[i]) / mass[i];
    rep.recovered[i] = v;
    vals.push_back(v);
  }
  if (vals.empty()) {
    return rep;
  }
  rep.min = *std::min_element(vals.begin(), vals.end());
  const std::size_t mid = vals.size() / 2;
  std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(mid), vals.end());
  rep.median = vals[mid];
  rep.strict = rep.min > 0.0;
  return rep;
}

namespace {

// Log grid of magnitudes used when sampling one-sided bounds of f.
std::vector<double> magnitude_grid(double lo, double hi, int per_decade) {
  std::vector<double> t;
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  const int n = static_cast<int>(std::ceil((b - a) * per_decade));
  for (int k = 0; k <= n; ++k) {
    t.push_back(std::pow(10.0, a + (b - a) * k / n));
  }
  return t;
}

}  // namespace

FeFunction forcing_bound(const NonlinearitySpec& spec, const MeshPtr& mesh, double mu, int sign) {
  const auto grid = magnitude_grid(1e-8, 1e8, 100);
  const auto nodes = mesh->nodes();
  const double s = sign < 0 ? -1.0 : 1.0;
  FeFunction g(mesh);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = nodes[i];
    double best = s * spec.f(x, 0.0);
    std::size_t arg = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double t = s * grid[k];
      const double v = s * (spec.f(x, t) - mu * phi_p(t, spec.p));
      if (v > best) {
        best = v;
        arg = k + 1;
      }
    }
    if (arg == grid.size()) {
      throw BuildError("forcing bound unbounded: f grows faster than mu |t|^(p-1)");
    }
    g[i] = 1.01 * std::max(best, 0.0);
  }
  return g;
}

FeFunction solve_shifted(const FeFunction& load, double c, double boundary_value, double p,
                         const NewtonConfig& cfg) {
  const MeshPtr& mesh = load.mesh_ptr();
  const FeFunction bnd(mesh, boundary_value);
  const auto rhs_of = [&](const FeFunction& w) {
    FeFunction b = load;
    for (std::size_t i = 0; i < b.size(); ++i) {
      b[i] += c * phi_p(w[i], p);
    }
    return b;
  };
  // Picard sweeps bring the iterate near the coercive minimizer, Newton finishes.
  FeFunction w = solve_monotone_full(load, p, 0.0, cfg, {}, bnd).v;
  for (int k = 0; k < 200; ++k) {
    FeFunction next = solve_monotone_full(rhs_of(w), p, 0.0, cfg, w, bnd).v;
    const double change = w1p_norm(next - w, p) / (1.0 + w1p_norm(next, p));
    w = std::move(next);
    if (change < 1e-6) {
      break;
    }
  }
  const auto loadv = load;
  const auto spec = NonlinearitySpec::custom(
      p, [loadv, c, p](Point x, double t) { return c * phi_p(t, p) + loadv(x); },
      [loadv, c, p](Point x, double t) { return c * std::pow(std::abs(t), p) / p + loadv(x) * t; },
      [c, p](Point, double t) { return c * (p - 1.0) * std::pow(std::abs(t), p - 2.0); }, p, 0.0,
      0.0, mesh->domain());
  std::vector<double> mb(load.size());
  const auto mass = mesh->lumped_mass();
  for (std::size_t i = 0; i < mb.size(); ++i) {
    mb[i] = mass[i] * load[i];
  }
  const double tol = cfg.tolerance * (1.0 + dual_norm_surrogate(*mesh, mb, p));
  const NewtonResult nr = newton_solve(w, spec, cfg, tol, 100);
  if (!nr.converged) {
    throw BuildError("shifted boundary-value solve did not converge (residual " +
                     std::to_string(nr.residual) + ")");
  }
  return nr.u;
}

namespace {

ConeSpec build_outer(const NonlinearitySpec& spec, const FeFunction& g, double lambda1, double mu,
                     double boundary_depth, const NewtonConfig& cfg, ConeKind kind) {
  if (!(mu > 0.0 && mu < lambda1)) {
    throw ParameterError("outer cone builder needs 0 < mu < lambda1");
  }
  if (boundary_depth < 0.0) {
    throw ParameterError("boundary depth must be nonnegative");
  }
  if (g.min() < 0.0 || g.sup_norm() == 0.0) {
    throw ParameterError("forcing g must be nonnegative and not identically zero");
  }
  const double p = spec.p;
  const double c = 0.5 * (lambda1 + mu);
  const double s = kind == ConeKind::Sub ? -1.0 : 1.0;
  const FeFunction w = solve_shifted(g * s, c, s * boundary_depth, p, cfg);
  const Mesh& mesh = w.mesh();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool bad = mesh.is_boundary(i) ? s * w[i] < 0.0 : !(s * w[i] > 0.0);
    if (bad) {
      throw BuildError(std::string(kind == ConeKind::Sub ? "alpha1" : "beta2") +
                       " has the wrong sign at node " + std::to_string(i));
    }
  }
  ConeSpec cone = make_cone(kind, w, p, kind == ConeKind::Sub ? "alpha1" : "beta2");
  // a1 = f(alpha1) - c phi_p(alpha1) + g; b2 = c phi_p(beta2) + g - f(beta2).
  const auto nodes = mesh.nodes();
  cone.remainder = FeFunction(w.mesh_ptr());
  for (std::size_t i = 0; i < w.size(); ++i) {
    cone.remainder[i] = -s * (spec.f(nodes[i], w[i]) - c * phi_p(w[i], p)) + g[i];
  }
  const auto f = spec.f;
  cone.remainder_fn = [w, g, f, c, p, s](const SamplePoint& x) {
    const double v = w(x);
    return -s * (f(x.position(), v) - c * phi_p(v, p)) + g(x);
  };
  cone.strict = verify_strict(cone, spec).strict && cone.remainder.min() > 0.0;
  if (!cone.strict) {
    throw BuildError(cone.label + " is not a strict " +
                     (kind == ConeKind::Sub ? "subsolution" : "supersolution"));
  }
  return cone;
}

}  // namespace

ConeSpec build_alpha1(const NonlinearitySpec& spec, const FeFunction& g, double lambda1,
                      double mu, double boundary_depth, const NewtonConfig& cfg) {
  return build_outer(spec, g, lambda1, mu, boundary_depth, cfg, ConeKind::Sub);
}

ConeSpec build_beta2(const NonlinearitySpec& spec, const FeFunction& g, double lambda1, double mu,
                     double boundary_depth, const NewtonConfig& cfg) {
  return build_outer(spec, g, lambda1, mu, boundary_depth, cfg, ConeKind::Super);
}

LadderParams ladder_params(const NonlinearitySpec& spec, const EigenResult& eig) {
  const MeshPtr& mesh = eig.phi1.mesh_ptr();
  const double p = spec.p;
  const double l1 = eig.lambda1;
  const auto nodes = mesh->nodes();
  const auto interior = mesh->interior_nodes();
  double lambda = spec.lambda;
  if (!std::isfinite(lambda)) {
    lambda = std::numeric_limits<double>::infinity();
    for (int i : interior) {
      for (double t : {-1e-10, 1e-10}) {
        lambda = std::min(lambda, spec.f(nodes[i], t) / phi_p(t, p));
      }
    }
  }
  if (!(lambda > l1)) {
    throw ParameterError("ladder: the small-t slope lambda = " + std::to_string(lambda) +
                         " does not exceed lambda1 = " + std::to_string(l1));
  }
  const double threshold = 1.01 * 0.5 * (lambda + l1);
  const int kmin = -40;
  const int kmax = 20;
  // ok[k - kmin]: every sample in [2^(k-1), 2^k) satisfies the bounds.
  std::vector<char> ok;
  for (int k = kmin; k <= kmax; ++k) {
    bool good = true;
    for (int j = 0; j < 16 && good; ++j) {
      const double t = std::ldexp(std::pow(2.0, j / 16.0), k - 1);
      for (int i : interior) {
        for (double s : {-1.0, 1.0}) {
          const double ts = s * t;
          const double q = spec.f(nodes[i], ts) / phi_p(ts, p);
          bool pass = q > threshold;
          if (pass && p > 2.0) {
            pass = std::abs(spec.df_of(nodes[i], ts)) <
                   0.99 * 2.0 * (p - 1.0) * lambda * std::pow(t, p - 2.0);
          }
          if (!pass) {
            good = false;
            break;
          }
        }
        if (!good) {
          break;
        }
      }
    }
    ok.push_back(good ? 1 : 0);
  }
  int best = kmin - 1;
  for (int k = kmin; k <= kmax && ok[k - kmin]; ++k) {
    best = k;
  }
  if (best < kmin) {
    throw ParameterError("ladder: f(x,t)/|t|^(p-2)t > (lambda+lambda1)/2 fails for all sampled small t");
  }
  LadderParams lp;
  lp.t_bar = std::ldexp(1.0, best);
  lp.l_bar = lp.t_bar / eig.phi1.sup_norm();
  lp.l = 0.25 * lp.l_bar;
  lp.lambda = lambda;
  lp.mu = spec.mu;
  return lp;
}

std::pair<ConeSpec, ConeSpec> build_ladder(const NonlinearitySpec& spec, const EigenResult& eig,
                                           double l, const LadderParams& params) {
  if (!(l > 0.0 && l < params.l_bar)) {
    throw ParameterError("ladder scale l must satisfy 0 < l < l_bar = " +
                         std::to_string(params.l_bar));
  }
  const double p = spec.p;
  const double l1 = eig.lambda1;
  const FeFunction phi = eig.phi1;
  const auto nodes = phi.mesh().nodes();
  const auto f = spec.f;
  // a2 = f(l phi1) - lambda1 (l phi1)^(p-1); b1 = -lambda1 (l phi1)^(p-1) - f(-l phi1).
  const auto a2 = [f, phi, l, l1, p](const SamplePoint& x) {
    const double v = l * std::max(phi(x), 0.0);
    return f(x.position(), v) - l1 * std::pow(v, p - 1.0);
  };
  const auto b1 = [f, phi, l, l1, p](const SamplePoint& x) {
    const double v = l * std::max(phi(x), 0.0);
    return -l1 * std::pow(v, p - 1.0) - f(x.position(), -v);
  };
  ConeSpec alpha = make_cone(ConeKind::Sub, phi * l, p, "alpha2");
  ConeSpec beta = make_cone(ConeKind::Super, phi * (-l), p, "beta1");
  alpha.remainder = FeFunction(phi.mesh_ptr());
  beta.remainder = FeFunction(phi.mesh_ptr());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const SamplePoint sp{nodes[i], {}, 0.0};
    alpha.remainder[i] = a2(sp);
    beta.remainder[i] = b1(sp);
  }
  alpha.remainder_fn = a2;
  beta.remainder_fn = b1;
  for (ConeSpec* c : {&alpha, &beta}) {
    const StrictReport rep = verify_strict(*c, spec);
    c->strict = rep.strict;
    if (!rep.strict) {
      throw BuildError(c->label + " is not strict (min recovered remainder " +
                       std::to_string(rep.min) + ")");
    }
  }
  return {alpha, beta};
}

double estimate_eps_bar(const ConeSpec& sub, const ConeSpec& super) {
  if (!sub.is_sub() || super.is_sub()) {
    throw ParameterError("estimate_eps_bar expects (sub, super)");
  }
  FeFunction a0 = sub.vertex;
  FeFunction b0 = super.vertex;
  a0.clear_boundary();
  b0.clear_boundary();
  // max(dist to sub cone, dist to super cone) along theta a0 + (1 - theta) b0;
  // the first term decreases in theta and the second increases.
  const auto gap = [&](double theta) {
    const FeFunction u = a0 * theta + b0 * (1.0 - theta);
    return std::pair{cone_distance(u, sub), cone_distance(u, super)};
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    const auto [ds, dp] = gap(mid);
    if (ds > dp) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const auto [ds, dp] = gap(0.5 * (lo + hi));
  return std::max(ds, dp);
}

DisjointReport cones_disjoint_report(const ConeSpec& sub, const ConeSpec& super, double eps,
                                     double min_fraction) {
  DisjointReport rep;
  const Mesh& mesh = sub.vertex.mesh();
  const auto mass = mesh.lumped_mass();
  const double margin =
      1e-8 * (1.0 + std::max(sub.vertex.sup_norm(), super.vertex.sup_norm()));
  double meas = 0.0;
  for (int i : mesh.interior_nodes()) {
    if (sub.vertex[i] > super.vertex[i] + margin) {
      meas += mass[i];
    }
  }
  rep.measure_fraction = meas / mesh.domain().measure();
  rep.eps_bar = estimate_eps_bar(sub, super);
  rep.disjoint = rep.measure_fraction > min_fraction && eps < rep.eps_bar;
  return rep;
}

bool cones_disjoint(const ConeSpec& sub, const ConeSpec& super, double eps) {
  return cones_disjoint_report(sub, super, eps).disjoint;
}

}  // namespace conewalk
