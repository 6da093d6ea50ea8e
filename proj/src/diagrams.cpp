#include "chaoslab/diagrams.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chaoslab {
namespace diagrams {

int Diagram::vertices() const {
  int n = 0;
  for (int v : order) n += v;
  return n;
}

int Diagram::row_of(int vertex) const {
  int acc = 0;
  for (int r = 0; r < rows(); ++r) {
    acc += order[r];
    if (vertex < acc) return r;
  }
  throw std::out_of_range("Diagram::row_of");
}

std::string Diagram::to_text() const {
  std::string s = "order";
  for (int v : order) s += " " + std::to_string(v);
  s += " |";
  auto e = edges;
  std::sort(e.begin(), e.end());
  for (const auto& [a, b] : e)
    s += " (" + std::to_string(a) + "," + std::to_string(b) + ")";
  return s;
}

namespace {

void check_order(const std::vector<int>& order) {
  if (order.empty()) throw std::invalid_argument("diagram order must be nonempty");
  int total = 0;
  for (int v : order) {
    if (v < 1) throw std::invalid_argument("diagram rows must have >= 1 vertex");
    total += v;
  }
  if (total > 16) {
    // factorial growth; the would-be count is bounded by (total-1)!!
    double bound = 1;
    for (int t = total - 1; t > 1; t -= 2) bound *= t;
    throw std::invalid_argument(
        "diagram order too large (total arity " + std::to_string(total) +
        " > 16, up to ~" + std::to_string(static_cast<long long>(bound)) +
        " diagrams)");
  }
}

struct Enumerator {
  std::vector<int> row;   // row of each vertex
  std::vector<int> mate;  // -1 when unmatched
  Diagram d;
  const std::function<void(const Diagram&)>* visit;
  bool complete_only;

  void run(int v) {
    const int n = static_cast<int>(row.size());
    while (v < n && mate[v] >= 0) ++v;
    if (v == n) {
      if (!complete_only || d.complete()) (*visit)(d);
      return;
    }
    if (!complete_only) {
      run(v + 1);  // leave v unmatched
    }
    for (int u = v + 1; u < n; ++u) {
      if (mate[u] >= 0 || row[u] == row[v]) continue;
      mate[v] = u;
      mate[u] = v;
      d.edges.emplace_back(v, u);
      run(v + 1);
      d.edges.pop_back();
      mate[v] = -1;
      mate[u] = -1;
    }
  }
};

}  // namespace

void for_each_diagram(const std::vector<int>& order,
                      const std::function<void(const Diagram&)>& visit) {
  check_order(order);
  Enumerator e;
  e.d.order = order;
  for (int r = 0; r < static_cast<int>(order.size()); ++r)
    for (int i = 0; i < order[r]; ++i) e.row.push_back(r);
  e.mate.assign(e.row.size(), -1);
  e.visit = &visit;
  e.complete_only = false;
  e.run(0);
}

std::vector<Diagram> enumerate_diagrams(const std::vector<int>& order) {
  std::vector<Diagram> out;
  for_each_diagram(order, [&](const Diagram& d) { out.push_back(d); });
  return out;
}

void for_each_complete_diagram(const std::vector<int>& order,
                               const std::function<void(const Diagram&)>& visit) {
  check_order(order);
  int total = 0;
  for (int v : order) total += v;
  if (total % 2 != 0) return;  // no complete diagram on an odd vertex count
  Enumerator e;
  e.d.order = order;
  for (int r = 0; r < static_cast<int>(order.size()); ++r)
    for (int i = 0; i < order[r]; ++i) e.row.push_back(r);
  e.mate.assign(e.row.size(), -1);
  e.visit = &visit;
  e.complete_only = true;
  e.run(0);
}

std::vector<Diagram> complete_diagrams(const std::vector<int>& order) {
  std::vector<Diagram> out;
  for_each_complete_diagram(order, [&](const Diagram& d) { out.push_back(d); });
  return out;
}

std::int64_t count_complete(int m, int rows) {
  if (m < 1 || rows < 1) throw std::invalid_argument("count_complete: bad arguments");
  std::int64_t n = 0;
  for_each_complete_diagram(std::vector<int>(rows, m),
                            [&](const Diagram&) { ++n; });
  return n;
}

bool is_regular(const Diagram& d) {
  const int m = d.rows();
  if (m % 2 != 0) return false;
  if (!d.complete()) throw std::invalid_argument("is_regular: diagram must be complete");
  // try every pairing of the rows
  std::vector<int> rowmate(m, -1);
  const std::function<bool()> rec = [&]() -> bool {
    int r = 0;
    while (r < m && rowmate[r] >= 0) ++r;
    if (r == m) {
      for (const auto& [a, b] : d.edges) {
        const int ra = d.row_of(a), rb = d.row_of(b);
        if (rowmate[ra] != rb) return false;
      }
      return true;
    }
    for (int s = r + 1; s < m; ++s) {
      if (rowmate[s] >= 0) continue;
      rowmate[r] = s;
      rowmate[s] = r;
      if (rec()) return true;
      rowmate[r] = -1;
      rowmate[s] = -1;
    }
    return false;
  };
  return rec();
}

// ---------------------------------------------------------------------------
// GridKernel

namespace {

// signed index j in {-M..-1, 1..M} -> slot 0..2M-1
inline int s2i(int j, int M) { return j < 0 ? j + M : M + j - 1; }
inline int i2s(int i, int M) { return i < M ? i - M : i - M + 1; }

}  // namespace

GridKernel::GridKernel(std::shared_ptr<const chaos::RegularSystem> sys, int arity)
    : sys_(std::move(sys)), arity_(arity) {
  if (arity < 0) throw std::invalid_argument("GridKernel: negative arity");
  std::size_t n = 1;
  for (int i = 0; i < arity; ++i) n *= 2 * static_cast<std::size_t>(sys_->pairs());
  values_.assign(std::max<std::size_t>(n, 1), 0.0);
}

GridKernel GridKernel::from_function(
    std::shared_ptr<const chaos::RegularSystem> sys, int arity,
    const std::function<std::complex<double>(std::span<const double>)>& f) {
  GridKernel k(std::move(sys), arity);
  const int M = k.pairs();
  const int nu = k.sys_->nu;
  std::vector<int> idx(arity);
  std::vector<double> pt(static_cast<std::size_t>(arity) * nu);
  const std::size_t total = k.values_.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t fl = flat;
    for (int a = arity - 1; a >= 0; --a) {
      idx[a] = i2s(static_cast<int>(fl % (2 * M)), M);
      fl /= 2 * M;
    }
    for (int a = 0; a < arity; ++a) k.sys_->center(idx[a], pt.data() + a * nu);
    k.values_[flat] = f(pt);
  }
  return k;
}

std::complex<double> GridKernel::value(std::span<const int> signed_idx) const {
  const int M = pairs();
  std::size_t flat = 0;
  for (int a = 0; a < arity_; ++a) flat = flat * (2 * M) + s2i(signed_idx[a], M);
  return values_[flat];
}

void GridKernel::set_value(std::span<const int> signed_idx, std::complex<double> v) {
  const int M = pairs();
  std::size_t flat = 0;
  for (int a = 0; a < arity_; ++a) flat = flat * (2 * M) + s2i(signed_idx[a], M);
  values_[flat] = v;
  defect_cache_ = -1.0;
}

void GridKernel::for_each_tuple(
    const std::function<void(std::span<const int>, std::complex<double>)>& f) const {
  const int M = pairs();
  std::vector<int> idx(arity_);
  for (std::size_t flat = 0; flat < values_.size(); ++flat) {
    std::size_t fl = flat;
    for (int a = arity_ - 1; a >= 0; --a) {
      idx[a] = i2s(static_cast<int>(fl % (2 * M)), M);
      fl /= 2 * M;
    }
    f(idx, values_[flat]);
  }
}

double GridKernel::hermitian_defect() const {
  if (defect_cache_ >= 0) return defect_cache_;
  double worst = 0;
  std::vector<int> neg(arity_);
  for_each_tuple([&](std::span<const int> idx, std::complex<double> v) {
    for (int a = 0; a < arity_; ++a) neg[a] = -idx[a];
    worst = std::max(worst, std::abs(value(neg) - std::conj(v)));
  });
  defect_cache_ = worst;
  return worst;
}

GridKernel GridKernel::sym() const {
  GridKernel out(sys_, arity_);
  std::vector<int> perm(arity_), p(arity_);
  for (int i = 0; i < arity_; ++i) perm[i] = i;
  double nperm = 0;
  std::vector<std::vector<int>> perms;
  do {
    perms.push_back(perm);
    nperm += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  for_each_tuple([&](std::span<const int> idx, std::complex<double>) {
    std::complex<double> acc = 0;
    for (const auto& pp : perms) {
      for (int a = 0; a < arity_; ++a) p[a] = idx[pp[a]];
      acc += value(p);
    }
    out.set_value(idx, acc / nperm);
  });
  return out;
}

namespace {

bool admissible(std::span<const int> idx) {
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      if (std::abs(idx[a]) == std::abs(idx[b])) return false;
  return true;
}

}  // namespace

double GridKernel::norm2() const {
  double s = 0;
  for_each_tuple([&](std::span<const int> idx, std::complex<double> v) {
    if (!admissible(idx)) return;
    double w = std::norm(v);
    for (int a = 0; a < arity_; ++a) w *= sys_->mass_of(idx[a]);
    s += w;
  });
  return s;
}

std::complex<double> GridKernel::inner(const GridKernel& other) const {
  if (!same_system(*this, other) || arity_ != other.arity_)
    throw std::invalid_argument("GridKernel::inner: mismatched kernels");
  std::complex<double> s = 0;
  for_each_tuple([&](std::span<const int> idx, std::complex<double> v) {
    if (!admissible(idx)) return;
    std::complex<double> w = v * std::conj(other.value(idx));
    for (int a = 0; a < arity_; ++a) w *= sys_->mass_of(idx[a]);
    s += w;
  });
  return s;
}

GridKernel GridKernel::scaled(std::complex<double> c) const {
  GridKernel out = *this;
  for (auto& v : out.values_) v *= c;
  return out;
}

bool same_system(const GridKernel& a, const GridKernel& b) {
  return a.system().get() == b.system().get();
}

// ---------------------------------------------------------------------------
// Contraction and moments

GridKernel contract(const std::vector<GridKernel>& kernels, const Diagram& d) {
  if (kernels.size() != d.order.size())
    throw std::invalid_argument("contract: kernel count does not match diagram rows");
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    if (kernels[i].arity() != d.order[i])
      throw std::invalid_argument("contract: kernel arity does not match diagram order");
    if (!same_system(kernels[i], kernels[0]))
      throw std::invalid_argument("contract: kernels adapted to different regular systems");
  }
  const auto sys = kernels[0].system();
  const int M = sys->pairs();
  const int n_vertices = d.vertices();
  const int n_edges = d.edge_count();
  const int out_arity = n_vertices - 2 * n_edges;

  // an edge's earlier (row-major) vertex keeps +x, the later one gets -x
  std::vector<int> bound_of(n_vertices, -1);
  for (int e = 0; e < n_edges; ++e) {
    bound_of[d.edges[e].first] = e;
    bound_of[d.edges[e].second] = e;
  }
  std::vector<int> free_slots;
  for (int v = 0; v < n_vertices; ++v)
    if (bound_of[v] < 0) free_slots.push_back(v);

  GridKernel out(sys, out_arity);
  std::vector<int> slot_idx(n_vertices, 0);
  std::vector<int> bound_idx(n_edges, 0);
  std::vector<int> row_args;
  std::vector<int> free_idx(out_arity);

  const std::function<std::complex<double>(int)> sum_bound = [&](int e) -> std::complex<double> {
    if (e == n_edges) {
      // all slots assigned; per-row admissibility
      std::complex<double> w = 1.0;
      int v0 = 0;
      for (int r = 0; r < d.rows(); ++r) {
        row_args.assign(slot_idx.begin() + v0, slot_idx.begin() + v0 + d.order[r]);
        if (!admissible(row_args)) return 0.0;
        w *= kernels[r].value(row_args);
        if (w == std::complex<double>(0.0)) return 0.0;
        v0 += d.order[r];
      }
      return w;
    }
    std::complex<double> acc = 0;
    for (int j = -M; j <= M; ++j) {
      if (j == 0) continue;
      slot_idx[d.edges[e].first] = j;
      slot_idx[d.edges[e].second] = -j;
      const std::complex<double> inner_sum = sum_bound(e + 1);
      acc += inner_sum * sys->mass_of(j);
    }
    return acc;
  };

  const std::size_t out_total = out.flat_size();
  for (std::size_t flat = 0; flat < out_total; ++flat) {
    std::size_t fl = flat;
    for (int a = out_arity - 1; a >= 0; --a) {
      free_idx[a] = i2s(static_cast<int>(fl % (2 * M)), M);
      fl /= 2 * M;
    }
    for (int a = 0; a < out_arity; ++a) slot_idx[free_slots[a]] = free_idx[a];
    out.raw(flat) = sum_bound(0);
  }
  return out;
}

double product_expectation(const std::vector<GridKernel>& kernels) {
  if (kernels.empty()) return 1.0;
  std::vector<int> order;
  int total = 0;
  for (const auto& k : kernels) {
    order.push_back(k.arity());
    total += k.arity();
    if (!same_system(k, kernels[0]))
      throw std::invalid_argument("product_expectation: mismatched regular systems");
  }
  if (total % 2 != 0) return 0.0;
  std::complex<double> acc = 0;
  for_each_complete_diagram(order, [&](const Diagram& d) {
    const GridKernel scalar = contract(kernels, d);
    acc += scalar.raw(0);
  });
  if (std::abs(acc.imag()) > 1e-9 * (1.0 + std::abs(acc.real())))
    throw std::runtime_error("product_expectation: non-real result, kernels not Hermitian");
  return acc.real();
}

double product_expectation_tensor(const std::vector<int>& arities,
                                  const std::vector<std::vector<double>>& inner) {
  if (arities.size() != inner.size())
    throw std::invalid_argument("product_expectation_tensor: size mismatch");
  double acc = 0;
  for_each_complete_diagram(arities, [&](const Diagram& d) {
    double w = 1;
    for (const auto& [a, b] : d.edges) w *= inner[d.row_of(a)][d.row_of(b)];
    acc += w;
  });
  return acc;
}

double moment_hermite(int m, int p, double r0) {
  if (m < 1 || p < 1) throw std::invalid_argument("moment_hermite: bad arguments");
  if (m * p % 2 != 0) return 0.0;
  std::vector<int> arities(p, m);
  std::vector<std::vector<double>> inner(p, std::vector<double>(p, r0));
  return product_expectation_tensor(arities, inner);
}

}  // namespace diagrams
}  // namespace chaoslab
