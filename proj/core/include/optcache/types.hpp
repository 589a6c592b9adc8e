#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace optcache {

using Real = double;

// Feasibility tolerance on all polytope constraints.
inline constexpr Real kFeasTol = 1e-9;

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Utility weights w_nij in [0, w_max]. Most experiments use either a single
// scalar (hit rate) or a per-cache vector, so the dense N*I*J tensor is
// optional.
struct UtilityWeights {
  enum class Kind { Uniform, PerCache, PerLocationCache, Full };
  Kind kind = Kind::Uniform;
  Real uniform = 1.0;
  std::vector<Real> per_cache;        // J entries
  std::vector<Real> per_loc_cache;    // I*J entries
  std::vector<Real> full;             // N*I*J entries
  Real max_weight = 1.0;              // w bound

  Real at(int n, int i, int j, int I, int J) const {
    switch (kind) {
      case Kind::Uniform: return uniform;
      case Kind::PerCache: return per_cache[static_cast<std::size_t>(j)];
      case Kind::PerLocationCache:
        return per_loc_cache[static_cast<std::size_t>(i) * J + j];
      case Kind::Full:
        return full[(static_cast<std::size_t>(n) * I + i) * J + j];
    }
    return uniform;
  }
};

// Bipartite topology: I user locations, J edge caches, root absorbs misses.
struct CacheNetwork {
  int num_files = 0;      // N
  int num_locations = 0;  // I
  int num_caches = 0;     // J
  std::vector<Real> capacity;   // per cache, in (fractional) files
  std::vector<std::uint8_t> link;  // I*J connectivity
  UtilityWeights weights;
  std::vector<Real> file_size;  // empty => unit sizes

  bool connected(int i, int j) const {
    return link[static_cast<std::size_t>(i) * num_caches + j] != 0;
  }
  Real weight(int n, int i, int j) const {
    return weights.at(n, i, j, num_locations, num_caches);
  }
  Real size_of(int n) const {
    return file_size.empty() ? 1.0 : file_size[static_cast<std::size_t>(n)];
  }
  Real max_capacity() const {
    Real c = 0.0;
    for (Real cj : capacity) c = std::max(c, cj);
    return c;
  }
  Real total_capacity() const {
    Real c = 0.0;
    for (Real cj : capacity) c += cj;
    return c;
  }

  void validate() const {
    if (num_files <= 0 || num_locations <= 0 || num_caches <= 0)
      throw InvalidInput("network dimensions must be positive");
    if (static_cast<int>(capacity.size()) != num_caches)
      throw InvalidInput("capacity size mismatch");
    for (Real cj : capacity)
      if (cj < 0.0) throw InvalidInput("negative cache capacity");
    if (link.size() != static_cast<std::size_t>(num_locations) * num_caches)
      throw InvalidInput("connectivity size mismatch");
    if (!file_size.empty() &&
        file_size.size() != static_cast<std::size_t>(num_files))
      throw InvalidInput("file size vector mismatch");
  }

  void check_request(int n, int i) const {
    if (n < 0 || n >= num_files) throw InvalidInput("file index out of range");
    if (i < 0 || i >= num_locations)
      throw InvalidInput("location index out of range");
  }
};

inline CacheNetwork make_single_cache(int num_files, Real capacity, Real w = 1.0) {
  CacheNetwork net;
  net.num_files = num_files;
  net.num_locations = 1;
  net.num_caches = 1;
  net.capacity = {capacity};
  net.link = {1};
  net.weights.kind = UtilityWeights::Kind::Uniform;
  net.weights.uniform = w;
  net.weights.max_weight = w;
  return net;
}

struct Request {
  int file = 0;
  int location = 0;
  long slot = 1;
};

struct RequestBatch {
  std::vector<Request> requests;
  long slot = 1;
  int size() const { return static_cast<int>(requests.size()); }
};

inline std::int64_t row_key(int n, int i) {
  return (static_cast<std::int64_t>(n) << 24) | static_cast<std::int64_t>(i);
}

// Registry of (file, location) pairs whose routing row is materialized.
// Rows are appended in encounter order so replay is deterministic.
struct RowSupport {
  std::vector<std::pair<int, int>> keys;
  std::unordered_map<std::int64_t, int> index;

  int ensure(int n, int i) {
    std::int64_t k = row_key(n, i);
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(keys.size());
    index.emplace(k, id);
    keys.emplace_back(n, i);
    return id;
  }
  int find(int n, int i) const {
    auto it = index.find(row_key(n, i));
    return it == index.end() ? -1 : it->second;
  }
  int rows() const { return static_cast<int>(keys.size()); }
};

// Joint fractional caching + routing point x = (y, z). The z block stores
// only materialized rows (rows * J, row-major).
struct DecisionVector {
  int J = 1;
  std::vector<Real> y;  // N*J
  RowSupport support;
  std::vector<Real> z;  // support.rows() * J

  static DecisionVector zeros(const CacheNetwork& net) {
    DecisionVector x;
    x.J = net.num_caches;
    x.y.assign(static_cast<std::size_t>(net.num_files) * net.num_caches, 0.0);
    return x;
  }

  Real yv(int n, int j) const { return y[static_cast<std::size_t>(n) * J + j]; }
  Real& yv(int n, int j) { return y[static_cast<std::size_t>(n) * J + j]; }

  int ensure_row(int n, int i) {
    int before = support.rows();
    int id = support.ensure(n, i);
    if (support.rows() > before) z.resize(static_cast<std::size_t>(support.rows()) * J, 0.0);
    return id;
  }
  Real zv(int n, int i, int j) const {
    int id = support.find(n, i);
    return id < 0 ? 0.0 : z[static_cast<std::size_t>(id) * J + j];
  }
  Real* row(int id) { return z.data() + static_cast<std::size_t>(id) * J; }
  const Real* row(int id) const { return z.data() + static_cast<std::size_t>(id) * J; }
};

// Sparse gradient: nonzero only on the z rows of the active requests.
struct GradientVector {
  struct Entry {
    int file = 0;
    int location = 0;
    std::vector<Real> per_cache;  // J values, 0 where not connected
  };
  std::vector<Entry> entries;

  bool empty() const { return entries.empty(); }
  Real squared_norm() const {
    Real s = 0.0;
    for (const auto& e : entries)
      for (Real v : e.per_cache) s += v * v;
    return s;
  }
};

// Squared Euclidean distance between two sparse gradients (prediction error h_t).
Real gradient_sq_dist(const GradientVector& a, const GradientVector& b);

struct UtilityValue {
  Real value = 0.0;
};

}  // namespace optcache
