#include "optcache/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "optcache/model.hpp"

namespace optcache {

namespace {

inline Real wgt(const CappedSimplexSpec& s, int i) {
  return s.weight.empty() ? 1.0 : s.weight[static_cast<std::size_t>(i)];
}

}  // namespace

std::vector<Real> project_capped_simplex(const std::vector<Real>& v,
                                         const CappedSimplexSpec& spec) {
  spec.validate();
  const int d = spec.dim;
  if (static_cast<int>(v.size()) != d)
    throw InvalidInput("capped simplex: point size mismatch");

  std::vector<Real> x(static_cast<std::size_t>(d));
  Real load = 0.0;
  for (int i = 0; i < d; ++i) {
    x[i] = std::clamp(v[i], 0.0, spec.cap);
    load += wgt(spec, i) * x[i];
  }
  if (load <= spec.budget) return x;

  // g(theta) = sum_i w_i clamp(v_i - theta w_i, 0, cap) is piecewise linear
  // and nonincreasing; locate the segment containing the budget by binary
  // search over breakpoints, then solve the linear piece exactly.
  auto g = [&](Real theta) {
    Real s = 0.0;
    for (int i = 0; i < d; ++i)
      s += wgt(spec, i) * std::clamp(v[i] - theta * wgt(spec, i), 0.0, spec.cap);
    return s;
  };

  std::vector<Real> bps;
  bps.reserve(2 * static_cast<std::size_t>(d) + 1);
  bps.push_back(0.0);
  for (int i = 0; i < d; ++i) {
    Real w = wgt(spec, i);
    if (w <= 0.0) continue;
    bps.push_back(v[i] / w);
    bps.push_back((v[i] - spec.cap) / w);
  }
  std::sort(bps.begin(), bps.end());

  // first breakpoint with g(bp) <= budget
  int lo = 0, hi = static_cast<int>(bps.size()) - 1;
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    if (g(bps[mid]) <= spec.budget)
      hi = mid;
    else
      lo = mid + 1;
  }
  const Real tb = bps[static_cast<std::size_t>(lo)];
  const Real ta = lo > 0 ? bps[static_cast<std::size_t>(lo - 1)] : 0.0;

  Real theta = tb;
  const Real tm = 0.5 * (ta + tb);
  Real num = -spec.budget, den = 0.0;
  for (int i = 0; i < d; ++i) {
    Real w = wgt(spec, i);
    Real xv = v[i] - tm * w;
    if (xv >= spec.cap)
      num += w * spec.cap;
    else if (xv > 0.0) {
      num += w * v[i];
      den += w * w;
    }
  }
  if (den > 0.0) theta = num / den;
  theta = std::max(theta, 0.0);

  for (int i = 0; i < d; ++i)
    x[i] = std::clamp(v[i] - theta * wgt(spec, i), 0.0, spec.cap);
  return x;
}

std::vector<Real> project_simplex(const std::vector<Real>& v) {
  if (v.empty()) throw InvalidInput("simplex projection: empty vector");
  const int d = static_cast<int>(v.size());
  std::vector<Real> u(v);
  std::sort(u.begin(), u.end(), std::greater<Real>());
  Real css = 0.0, tau = 0.0;
  int rho = 0;
  for (int k = 0; k < d; ++k) {
    css += u[static_cast<std::size_t>(k)];
    Real t = (css - 1.0) / (k + 1);
    if (u[static_cast<std::size_t>(k)] - t > 0.0) {
      rho = k + 1;
      tau = t;
    }
  }
  (void)rho;
  std::vector<Real> x(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) x[i] = std::max(v[static_cast<std::size_t>(i)] - tau, 0.0);
  return x;
}

namespace {

// Projection onto {0 <= y <= 1, 0 <= z <= 1, z <= y}.
inline void project_pair(Real a, Real b, Real& py, Real& pz) {
  py = std::clamp(a, 0.0, 1.0);
  pz = std::clamp(b, 0.0, 1.0);
  if (pz <= py) return;
  Real t = std::clamp(0.5 * (a + b), 0.0, 1.0);
  py = t;
  pz = t;
}

Real joint_residual(const CacheNetwork& net, const RowSupport& support,
                    const std::vector<Real>& y, const std::vector<Real>& z) {
  const int N = net.num_files, J = net.num_caches;
  Real r = 0.0;
  for (int j = 0; j < J; ++j) {
    Real load = 0.0;
    for (int n = 0; n < N; ++n) {
      Real v = y[static_cast<std::size_t>(n) * J + j];
      r = std::max(r, std::max(-v, v - 1.0));
      load += net.size_of(n) * v;
    }
    r = std::max(r, load - net.capacity[static_cast<std::size_t>(j)]);
  }
  for (int id = 0; id < support.rows(); ++id) {
    auto [n, i] = support.keys[static_cast<std::size_t>(id)];
    Real row_sum = 0.0;
    for (int j = 0; j < J; ++j) {
      Real v = z[static_cast<std::size_t>(id) * J + j];
      r = std::max(r, std::max(-v, v - 1.0));
      row_sum += v;
      Real bound = net.connected(i, j) ? y[static_cast<std::size_t>(n) * J + j] : 0.0;
      r = std::max(r, v - bound);
    }
    r = std::max(r, row_sum - 1.0);
  }
  return r;
}

// Closed-form single-cache path: dualize the capacity constraint and solve
// each file's (y, z_rows) block exactly, bisecting the multiplier.
ProjectionReport project_joint_single_cache(const CacheNetwork& net,
                                            const RowSupport& support,
                                            std::vector<Real>& y,
                                            std::vector<Real>& z) {
  const int N = net.num_files;
  const Real C = net.capacity[0];

  std::vector<std::vector<Real>> b(static_cast<std::size_t>(N));
  std::vector<std::vector<int>> rows_of(static_cast<std::size_t>(N));
  for (int id = 0; id < support.rows(); ++id) {
    auto [n, i] = support.keys[static_cast<std::size_t>(id)];
    if (!net.connected(i, 0)) {
      z[static_cast<std::size_t>(id)] = 0.0;
      continue;
    }
    b[static_cast<std::size_t>(n)].push_back(z[static_cast<std::size_t>(id)]);
    rows_of[static_cast<std::size_t>(n)].push_back(id);
  }
  for (auto& bn : b) std::sort(bn.begin(), bn.end(), std::greater<Real>());

  auto solve_y = [&](int n, Real theta) {
    const auto& bn = b[static_cast<std::size_t>(n)];
    const Real a = y[static_cast<std::size_t>(n)] - theta;
    const int m = static_cast<int>(bn.size());
    // minimize (y-a)^2/2 + sum_{b_k > y} (y-b_k)^2/2
    Real pref = 0.0, yk = std::clamp(a, 0.0, 1.0);
    for (int k = 0; k <= m; ++k) {
      Real cand = (a + pref) / (1 + k);
      Real upper = k == 0 ? std::numeric_limits<Real>::infinity()
                          : bn[static_cast<std::size_t>(k - 1)];
      Real lower = k == m ? -std::numeric_limits<Real>::infinity()
                          : bn[static_cast<std::size_t>(k)];
      if (cand <= upper && cand >= lower) {
        yk = std::clamp(cand, 0.0, 1.0);
        break;
      }
      if (k < m) pref += bn[static_cast<std::size_t>(k)];
    }
    return yk;
  };

  auto total_load = [&](Real theta) {
    Real s = 0.0;
    for (int n = 0; n < N; ++n) s += solve_y(n, theta);
    return s;
  };

  Real theta = 0.0;
  int iters = 1;
  if (total_load(0.0) > C) {
    Real hi = 1.0;
    for (int n = 0; n < N; ++n) {
      Real t = y[static_cast<std::size_t>(n)];
      for (Real bk : b[static_cast<std::size_t>(n)]) t += std::max(bk, 0.0);
      hi = std::max(hi, t);
    }
    Real lo = 0.0;
    for (int it = 0; it < 64; ++it) {
      Real mid = 0.5 * (lo + hi);
      if (total_load(mid) > C)
        lo = mid;
      else
        hi = mid;
      ++iters;
    }
    theta = hi;  // feasible side
  }

  for (int n = 0; n < N; ++n) {
    Real yn = solve_y(n, theta);
    const auto& ids = rows_of[static_cast<std::size_t>(n)];
    for (int id : ids)
      z[static_cast<std::size_t>(id)] = std::clamp(z[static_cast<std::size_t>(id)], 0.0, yn);
    y[static_cast<std::size_t>(n)] = yn;
  }

  ProjectionReport rep;
  rep.iterations = iters;
  rep.residual = std::max(0.0, joint_residual(net, support, y, z));
  rep.converged = true;
  return rep;
}

}  // namespace

ProjectionReport project_joint(const CacheNetwork& net, const RowSupport& support,
                               std::vector<Real>& y, std::vector<Real>& z,
                               Real tol, int max_sweeps) {
  if (tol <= 0.0) throw InvalidInput("project_joint: tol must be positive");
  const int N = net.num_files, J = net.num_caches, R = support.rows();
  if (static_cast<int>(y.size()) != N * J || static_cast<int>(z.size()) != R * J)
    throw InvalidInput("project_joint: point size mismatch");

  // Unconnected routing coordinates are identically zero.
  for (int id = 0; id < R; ++id) {
    auto [n, i] = support.keys[static_cast<std::size_t>(id)];
    (void)n;
    for (int j = 0; j < J; ++j)
      if (!net.connected(i, j)) z[static_cast<std::size_t>(id) * J + j] = 0.0;
  }

  ProjectionReport rep;
  Real r0 = joint_residual(net, support, y, z);
  if (r0 <= 1e-15) {
    rep.iterations = 1;
    rep.residual = std::max(r0, 0.0);
    return rep;
  }

  if (J == 1 && net.file_size.empty())
    return project_joint_single_cache(net, support, y, z);

  // Dykstra with per-family correction terms.
  std::vector<Real> pA(y.size(), 0.0), pB(z.size(), 0.0);
  std::vector<Real> cy(z.size(), 0.0), cz(z.size(), 0.0);
  std::vector<std::vector<int>> conn(static_cast<std::size_t>(R));
  for (int id = 0; id < R; ++id) {
    auto [n, i] = support.keys[static_cast<std::size_t>(id)];
    (void)n;
    for (int j = 0; j < J; ++j)
      if (net.connected(i, j)) conn[static_cast<std::size_t>(id)].push_back(j);
  }

  std::vector<Real> y_prev, z_prev, col, row;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    y_prev = y;
    z_prev = z;

    // per-cache capped simplices over y
    CappedSimplexSpec cap_spec;
    cap_spec.dim = N;
    cap_spec.cap = 1.0;
    if (!net.file_size.empty()) cap_spec.weight = net.file_size;
    for (int j = 0; j < J; ++j) {
      cap_spec.budget = net.capacity[static_cast<std::size_t>(j)];
      col.resize(static_cast<std::size_t>(N));
      for (int n = 0; n < N; ++n)
        col[static_cast<std::size_t>(n)] =
            y[static_cast<std::size_t>(n) * J + j] + pA[static_cast<std::size_t>(n) * J + j];
      std::vector<Real> proj = project_capped_simplex(col, cap_spec);
      for (int n = 0; n < N; ++n) {
        pA[static_cast<std::size_t>(n) * J + j] =
            col[static_cast<std::size_t>(n)] - proj[static_cast<std::size_t>(n)];
        y[static_cast<std::size_t>(n) * J + j] = proj[static_cast<std::size_t>(n)];
      }
    }

    // pairwise coupling boxes
    for (int id = 0; id < R; ++id) {
      auto [n, i] = support.keys[static_cast<std::size_t>(id)];
      (void)i;
      for (int j : conn[static_cast<std::size_t>(id)]) {
        std::size_t zi = static_cast<std::size_t>(id) * J + j;
        std::size_t yi = static_cast<std::size_t>(n) * J + j;
        Real a = y[yi] + cy[zi];
        Real bb = z[zi] + cz[zi];
        Real py, pz;
        project_pair(a, bb, py, pz);
        cy[zi] = a - py;
        cz[zi] = bb - pz;
        y[yi] = py;
        z[zi] = pz;
      }
    }

    // per-row simplices over z
    for (int id = 0; id < R; ++id) {
      const auto& cj = conn[static_cast<std::size_t>(id)];
      if (cj.empty()) continue;
      row.resize(cj.size());
      for (std::size_t k = 0; k < cj.size(); ++k) {
        std::size_t zi = static_cast<std::size_t>(id) * J + cj[k];
        row[k] = z[zi] + pB[zi];
      }
      CappedSimplexSpec row_spec;
      row_spec.dim = static_cast<int>(cj.size());
      row_spec.cap = 1.0;
      row_spec.budget = 1.0;
      std::vector<Real> proj = project_capped_simplex(row, row_spec);
      for (std::size_t k = 0; k < cj.size(); ++k) {
        std::size_t zi = static_cast<std::size_t>(id) * J + cj[k];
        pB[zi] = row[k] - proj[k];
        z[zi] = proj[k];
      }
    }

    Real change = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) change = std::max(change, std::abs(y[k] - y_prev[k]));
    for (std::size_t k = 0; k < z.size(); ++k) change = std::max(change, std::abs(z[k] - z_prev[k]));
    Real vio = joint_residual(net, support, y, z);
    rep.iterations = sweep;
    rep.residual = std::max(vio, 0.0);
    if (change <= tol && vio <= tol) {
      rep.converged = true;
      return rep;
    }
  }
  rep.converged = false;
  return rep;
}

std::vector<Real> maximize_linear_capped(const std::vector<Real>& coeff,
                                         const CappedSimplexSpec& spec) {
  spec.validate();
  const int d = spec.dim;
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return coeff[static_cast<std::size_t>(a)] > coeff[static_cast<std::size_t>(b)];
  });
  std::vector<Real> x(static_cast<std::size_t>(d), 0.0);
  Real remaining = spec.budget;
  for (int i : order) {
    if (remaining <= 0.0) break;
    if (coeff[static_cast<std::size_t>(i)] < 0.0) break;
    Real w = wgt(spec, i);
    Real amount = w > 0.0 ? std::min(spec.cap, remaining / w) : spec.cap;
    x[static_cast<std::size_t>(i)] = amount;
    remaining -= w * amount;
  }
  return x;
}

std::vector<Real> oftrl_argmin_capped(Real sum_sigma,
                                      const std::vector<Real>& weighted_center,
                                      const std::vector<Real>& linear,
                                      const CappedSimplexSpec& spec) {
  if (sum_sigma <= 0.0) return maximize_linear_capped(linear, spec);
  std::vector<Real> v(linear.size());
  for (std::size_t k = 0; k < v.size(); ++k)
    v[k] = (weighted_center[k] + linear[k]) / sum_sigma;
  return project_capped_simplex(v, spec);
}

std::vector<Real> oftrl_argmin_simplex(Real sum_sigma,
                                       const std::vector<Real>& weighted_center,
                                       const std::vector<Real>& linear) {
  if (linear.empty()) throw InvalidInput("oftrl_argmin_simplex: empty");
  if (sum_sigma <= 0.0) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(linear.size()); ++k)
      if (linear[static_cast<std::size_t>(k)] > linear[static_cast<std::size_t>(best)]) best = k;
    std::vector<Real> x(linear.size(), 0.0);
    x[static_cast<std::size_t>(best)] = 1.0;
    return x;
  }
  std::vector<Real> v(linear.size());
  for (std::size_t k = 0; k < v.size(); ++k)
    v[k] = (weighted_center[k] + linear[k]) / sum_sigma;
  return project_simplex(v);
}

void maximize_linear_joint(const CacheNetwork& net, const RowSupport& support,
                           const JointVec& linear, JointVec& out) {
  const int N = net.num_files, J = net.num_caches, R = support.rows();
  out.y.assign(static_cast<std::size_t>(N) * J, 0.0);
  out.z.assign(static_cast<std::size_t>(R) * J, 0.0);

  // Score y_nj with its own linear coefficient plus each row's best
  // attainable routing coefficient, attributed to the row's best cache.
  std::vector<Real> score(static_cast<std::size_t>(N) * J, 0.0);
  if (!linear.y.empty())
    for (std::size_t k = 0; k < score.size(); ++k) score[k] = linear.y[k];
  for (int id = 0; id < R; ++id) {
    auto [n, i] = support.keys[static_cast<std::size_t>(id)];
    int best_j = -1;
    Real best = 0.0;
    for (int j = 0; j < J; ++j) {
      if (!net.connected(i, j)) continue;
      Real a = linear.z[static_cast<std::size_t>(id) * J + j];
      if (best_j < 0 || a > best) {
        best_j = j;
        best = a;
      }
    }
    if (best_j >= 0 && best > 0.0)
      score[static_cast<std::size_t>(n) * J + best_j] += best;
  }

  CappedSimplexSpec spec;
  spec.dim = N;
  spec.cap = 1.0;
  if (!net.file_size.empty()) spec.weight = net.file_size;
  std::vector<Real> col(static_cast<std::size_t>(N));
  for (int j = 0; j < J; ++j) {
    spec.budget = net.capacity[static_cast<std::size_t>(j)];
    for (int n = 0; n < N; ++n)
      col[static_cast<std::size_t>(n)] = score[static_cast<std::size_t>(n) * J + j];
    std::vector<Real> yj = maximize_linear_capped(col, spec);
    for (int n = 0; n < N; ++n)
      out.y[static_cast<std::size_t>(n) * J + j] = yj[static_cast<std::size_t>(n)];
  }

  // Route each row greedily by its linear coefficients.
  for (int id = 0; id < R; ++id) {
    auto [n, i] = support.keys[static_cast<std::size_t>(id)];
    std::vector<int> order;
    for (int j = 0; j < J; ++j)
      if (net.connected(i, j) && linear.z[static_cast<std::size_t>(id) * J + j] > 0.0)
        order.push_back(j);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return linear.z[static_cast<std::size_t>(id) * J + a] >
             linear.z[static_cast<std::size_t>(id) * J + b];
    });
    Real remaining = 1.0;
    for (int j : order) {
      if (remaining <= 0.0) break;
      Real take = std::min(out.y[static_cast<std::size_t>(n) * J + j], remaining);
      out.z[static_cast<std::size_t>(id) * J + j] = take;
      remaining -= take;
    }
  }
}

ProjectionReport oftrl_argmin_joint(const CacheNetwork& net, const RowSupport& support,
                                    Real sum_sigma, const JointVec& weighted_center,
                                    const JointVec& linear, JointVec& out, Real tol) {
  ProjectionReport rep;
  if (sum_sigma <= 0.0) {
    maximize_linear_joint(net, support, linear, out);
    rep.iterations = 1;
    return rep;
  }
  const std::size_t ny = weighted_center.y.size(), nz = weighted_center.z.size();
  out.y.resize(ny);
  out.z.resize(nz);
  for (std::size_t k = 0; k < ny; ++k) {
    Real lin = linear.y.empty() ? 0.0 : linear.y[k];
    out.y[k] = (weighted_center.y[k] + lin) / sum_sigma;
  }
  for (std::size_t k = 0; k < nz; ++k)
    out.z[k] = (weighted_center.z[k] + linear.z[k]) / sum_sigma;
  return project_joint(net, support, out.y, out.z, tol);
}

}  // namespace optcache
