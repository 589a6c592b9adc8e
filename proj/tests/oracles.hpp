#pragma once

// Test-only reference solvers, deliberately independent of the library's
// algorithms: multiscale grid/pattern search over feasible points.

#include <cmath>
#include <functional>
#include <vector>

#include "optcache/types.hpp"

namespace oracles {

using optcache::Real;

// Minimizes a convex objective over a convex set given only callbacks, by
// pattern search: axis moves plus pairwise exchange moves (which track
// budget-type faces), with the step refined down to step_min.
inline std::vector<Real> pattern_search_min(
    std::vector<Real> x, const std::function<Real(const std::vector<Real>&)>& objective,
    const std::function<bool(const std::vector<Real>&)>& feasible, Real step0 = 0.5,
    Real step_min = 2e-4) {
  const int d = static_cast<int>(x.size());
  Real best = objective(x);
  for (Real step = step0; step >= step_min; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int i = 0; i < d; ++i) {
        for (Real s : {step, -step}) {
          std::vector<Real> cand = x;
          cand[static_cast<std::size_t>(i)] += s;
          if (!feasible(cand)) continue;
          Real v = objective(cand);
          if (v < best - 1e-15) {
            best = v;
            x = cand;
            improved = true;
          }
        }
      }
      // pair moves: opposite signs track budget faces, equal signs track
      // coupling faces (z <= y style)
      for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
          for (Real si : {-step, step}) {
            for (Real sj : {-step, step}) {
              std::vector<Real> cand = x;
              cand[static_cast<std::size_t>(i)] += si;
              cand[static_cast<std::size_t>(j)] += sj;
              if (!feasible(cand)) continue;
              Real v = objective(cand);
              if (v < best - 1e-15) {
                best = v;
                x = cand;
                improved = true;
              }
            }
          }
        }
      }
    }
  }
  return x;
}

inline Real sq_dist(const std::vector<Real>& a, const std::vector<Real>& b) {
  Real s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

// Reference Euclidean projection by pattern search.
inline std::vector<Real> grid_project(
    const std::vector<Real>& v,
    const std::function<bool(const std::vector<Real>&)>& feasible,
    std::vector<Real> start) {
  return pattern_search_min(
      std::move(start), [&](const std::vector<Real>& x) { return sq_dist(x, v); }, feasible);
}

// Linear inequality system A x <= b.
struct LinIneq {
  std::vector<std::vector<Real>> A;
  std::vector<Real> b;
  void add(std::vector<Real> row, Real rhs) {
    A.push_back(std::move(row));
    b.push_back(rhs);
  }
};

namespace detail {

inline std::vector<Real> solve_dense(std::vector<std::vector<Real>> m,
                                     std::vector<Real> rhs) {
  const int d = static_cast<int>(rhs.size());
  for (int c = 0; c < d; ++c) {
    int piv = c;
    for (int r = c + 1; r < d; ++r)
      if (std::abs(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) >
          std::abs(m[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)]))
        piv = r;
    std::swap(m[static_cast<std::size_t>(c)], m[static_cast<std::size_t>(piv)]);
    std::swap(rhs[static_cast<std::size_t>(c)], rhs[static_cast<std::size_t>(piv)]);
    Real diag = m[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
    for (int r = c + 1; r < d; ++r) {
      Real f = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] / diag;
      if (f == 0.0) continue;
      for (int k = c; k < d; ++k)
        m[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] -=
            f * m[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
      rhs[static_cast<std::size_t>(r)] -= f * rhs[static_cast<std::size_t>(c)];
    }
  }
  std::vector<Real> x(static_cast<std::size_t>(d), 0.0);
  for (int r = d - 1; r >= 0; --r) {
    Real s = rhs[static_cast<std::size_t>(r)];
    for (int k = r + 1; k < d; ++k)
      s -= m[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] *
           x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(r)] = s / m[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
  }
  return x;
}

}  // namespace detail

// Reference Euclidean projection onto {x : A x <= b} by a log-barrier
// interior-point method. `x` must be strictly feasible.
inline std::vector<Real> barrier_project(const std::vector<Real>& v, const LinIneq& con,
                                         std::vector<Real> x) {
  const int d = static_cast<int>(v.size());
  const int m = static_cast<int>(con.b.size());
  auto slack = [&](const std::vector<Real>& p, int i) {
    Real s = con.b[static_cast<std::size_t>(i)];
    for (int k = 0; k < d; ++k)
      s -= con.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
           p[static_cast<std::size_t>(k)];
    return s;
  };
  for (Real t = 1.0; m / t > 1e-11; t *= 10.0) {
    for (int newton = 0; newton < 80; ++newton) {
      std::vector<Real> g(static_cast<std::size_t>(d));
      std::vector<std::vector<Real>> H(static_cast<std::size_t>(d),
                                       std::vector<Real>(static_cast<std::size_t>(d), 0.0));
      for (int k = 0; k < d; ++k) {
        g[static_cast<std::size_t>(k)] =
            2.0 * t * (x[static_cast<std::size_t>(k)] - v[static_cast<std::size_t>(k)]);
        H[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = 2.0 * t;
      }
      for (int i = 0; i < m; ++i) {
        Real s = 1.0 / slack(x, i);
        const auto& a = con.A[static_cast<std::size_t>(i)];
        for (int k = 0; k < d; ++k) {
          if (a[static_cast<std::size_t>(k)] == 0.0) continue;
          g[static_cast<std::size_t>(k)] += a[static_cast<std::size_t>(k)] * s;
          for (int l = 0; l < d; ++l)
            H[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] +=
                a[static_cast<std::size_t>(k)] * a[static_cast<std::size_t>(l)] * s * s;
        }
      }
      std::vector<Real> neg_g(static_cast<std::size_t>(d));
      for (int k = 0; k < d; ++k) neg_g[static_cast<std::size_t>(k)] = -g[static_cast<std::size_t>(k)];
      auto dx = detail::solve_dense(H, neg_g);
      Real decrement = 0.0;
      for (int k = 0; k < d; ++k)
        decrement -= g[static_cast<std::size_t>(k)] * dx[static_cast<std::size_t>(k)];
      if (decrement < 1e-14) break;
      Real alpha = 1.0;
      for (int back = 0; back < 60; ++back, alpha *= 0.5) {
        std::vector<Real> cand = x;
        for (int k = 0; k < d; ++k)
          cand[static_cast<std::size_t>(k)] += alpha * dx[static_cast<std::size_t>(k)];
        bool ok = true;
        for (int i = 0; i < m && ok; ++i)
          if (slack(cand, i) <= 0.0) ok = false;
        if (ok) {
          x = std::move(cand);
          break;
        }
      }
    }
  }
  return x;
}

// Reference projection onto the joint caching-routing polytope. `flat` is
// [y (N*J); z (rows*J)]; disconnected z coordinates are pinned to zero.
inline std::vector<Real> joint_project_reference(const optcache::CacheNetwork& net,
                                                 const optcache::RowSupport& sup,
                                                 const std::vector<Real>& flat) {
  const int N = net.num_files, J = net.num_caches;
  const int ny = N * J;
  std::vector<int> free_idx;
  for (int k = 0; k < ny; ++k) free_idx.push_back(k);
  for (int id = 0; id < sup.rows(); ++id) {
    auto [n, i] = sup.keys[static_cast<std::size_t>(id)];
    (void)n;
    for (int j = 0; j < J; ++j)
      if (net.connected(i, j)) free_idx.push_back(ny + id * J + j);
  }
  const int d = static_cast<int>(free_idx.size());
  std::vector<int> pos(flat.size(), -1);
  for (int k = 0; k < d; ++k) pos[static_cast<std::size_t>(free_idx[static_cast<std::size_t>(k)])] = k;

  LinIneq con;
  auto unit = [&](int k, Real s) {
    std::vector<Real> row(static_cast<std::size_t>(d), 0.0);
    row[static_cast<std::size_t>(k)] = s;
    return row;
  };
  Real total_size = 0.0;
  for (int n = 0; n < N; ++n) total_size += net.size_of(n);
  std::vector<Real> x0(static_cast<std::size_t>(d), 0.0);
  for (int n = 0; n < N; ++n) {
    for (int j = 0; j < J; ++j) {
      int k = pos[static_cast<std::size_t>(n) * J + j];
      con.add(unit(k, -1.0), 0.0);
      con.add(unit(k, 1.0), 1.0);
      x0[static_cast<std::size_t>(k)] =
          std::min(0.4, 0.5 * net.capacity[static_cast<std::size_t>(j)] / total_size);
    }
  }
  for (int j = 0; j < J; ++j) {
    std::vector<Real> row(static_cast<std::size_t>(d), 0.0);
    for (int n = 0; n < N; ++n)
      row[static_cast<std::size_t>(pos[static_cast<std::size_t>(n) * J + j])] = net.size_of(n);
    con.add(std::move(row), net.capacity[static_cast<std::size_t>(j)]);
  }
  for (int id = 0; id < sup.rows(); ++id) {
    auto [n, i] = sup.keys[static_cast<std::size_t>(id)];
    std::vector<Real> row(static_cast<std::size_t>(d), 0.0);
    int conn = 0;
    for (int j = 0; j < J; ++j)
      if (net.connected(i, j)) ++conn;
    for (int j = 0; j < J; ++j) {
      if (!net.connected(i, j)) continue;
      int kz = pos[static_cast<std::size_t>(ny + id * J + j)];
      int ky = pos[static_cast<std::size_t>(n) * J + j];
      con.add(unit(kz, -1.0), 0.0);
      auto coup = unit(kz, 1.0);
      coup[static_cast<std::size_t>(ky)] = -1.0;
      con.add(std::move(coup), 0.0);
      row[static_cast<std::size_t>(kz)] = 1.0;
      x0[static_cast<std::size_t>(kz)] = std::min(0.5 * x0[static_cast<std::size_t>(ky)],
                                                  0.5 / conn);
    }
    con.add(std::move(row), 1.0);
  }

  std::vector<Real> v(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k)
    v[static_cast<std::size_t>(k)] = flat[static_cast<std::size_t>(free_idx[static_cast<std::size_t>(k)])];
  auto sol = barrier_project(v, con, x0);
  std::vector<Real> out(flat.size(), 0.0);
  for (int k = 0; k < d; ++k)
    out[static_cast<std::size_t>(free_idx[static_cast<std::size_t>(k)])] = sol[static_cast<std::size_t>(k)];
  return out;
}

}  // namespace oracles
