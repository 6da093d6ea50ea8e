#ifndef CHAOSLAB_DIAGRAMS_HPP
#define CHAOSLAB_DIAGRAMS_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "chaoslab/regular_system.hpp"

namespace chaoslab {
namespace diagrams {

/// Graph over row-arranged vertices: at most one edge per vertex, edges
/// across rows only. Vertices are numbered row-major; edges keep a < b.
struct Diagram {
  std::vector<int> order;  // n_1..n_m
  std::vector<std::pair<int, int>> edges;

  int rows() const { return static_cast<int>(order.size()); }
  int vertices() const;
  int edge_count() const { return static_cast<int>(edges.size()); }
  bool complete() const { return 2 * edge_count() == vertices(); }
  int row_of(int vertex) const;

  /// canonical one-line text form: order | sorted edge list
  std::string to_text() const;
};

/// Visits every diagram of the given order exactly once (the empty diagram
/// first); enumeration order is deterministic, lexicographic in the edge
/// pairing choices. Total vertex count is guarded at 16.
void for_each_diagram(const std::vector<int>& order,
                      const std::function<void(const Diagram&)>& visit);
std::vector<Diagram> enumerate_diagrams(const std::vector<int>& order);

void for_each_complete_diagram(const std::vector<int>& order,
                               const std::function<void(const Diagram&)>& visit);
std::vector<Diagram> complete_diagrams(const std::vector<int>& order);

/// Number of complete diagrams with `rows` rows of m vertices each.
std::int64_t count_complete(int m, int rows);

/// true iff the rows can be split into pairs such that every edge stays
/// inside its row pair; false for an odd number of rows.
bool is_regular(const Diagram& d);

/// Complex kernel on n-tuples of signed cell indices of a regular system.
/// Values are stored for all tuples; integration and contraction treat
/// tuples that repeat a |index| within one kernel as zero (the adapted
/// simple functions vanish there).
class GridKernel {
 public:
  GridKernel(std::shared_ptr<const chaos::RegularSystem> sys, int arity);

  static GridKernel from_function(
      std::shared_ptr<const chaos::RegularSystem> sys, int arity,
      const std::function<std::complex<double>(std::span<const double>)>& f);

  int arity() const { return arity_; }
  int pairs() const { return sys_->pairs(); }
  const std::shared_ptr<const chaos::RegularSystem>& system() const { return sys_; }

  std::complex<double> value(std::span<const int> signed_idx) const;
  void set_value(std::span<const int> signed_idx, std::complex<double> v);

  /// largest violation of value(-j...) = conj(value(j...))
  double hermitian_defect() const;

  /// arithmetic mean over argument permutations
  GridKernel sym() const;

  /// off-diagonal squared norm: sum over admissible tuples of |f|^2 prod G
  double norm2() const;

  /// off-diagonal inner product (f,g) = sum f conj(g) prod G (real for
  /// Hermitian kernels)
  std::complex<double> inner(const GridKernel& other) const;

  GridKernel scaled(std::complex<double> c) const;

  std::size_t flat_size() const { return values_.size(); }
  std::complex<double>& raw(std::size_t i) { defect_cache_ = -1.0; return values_[i]; }
  const std::complex<double>& raw(std::size_t i) const { return values_[i]; }

  /// iterate all tuples (admissible or not): callback(tuple, value)
  void for_each_tuple(const std::function<void(std::span<const int>, std::complex<double>)>& f) const;

 private:
  std::shared_ptr<const chaos::RegularSystem> sys_;
  int arity_;
  std::vector<std::complex<double>> values_;
  mutable double defect_cache_ = -1.0;  // lazily computed Hermitian defect
};

bool same_system(const GridKernel& a, const GridKernel& b);

/// Contraction kernel of the diagram: the tensor product of the kernels with
/// each edge's later vertex evaluated at the negated partner index and the
/// partner summed out against the cell masses. Free variables are renumbered
/// row-major. Bound sums skip assignments that would repeat a |index| within
/// one row; output entries whose free slots collide within a row are zero.
GridKernel contract(const std::vector<GridKernel>& kernels, const Diagram& d);

/// E[prod_i n_i! I(h_i)] for grid kernels: sum over complete diagrams of the
/// fully contracted scalar, exact for the discrete integrals.
double product_expectation(const std::vector<GridKernel>& kernels);

/// Same sum for tensor-power kernels phi_i^{(x) n_i} given the matrix of
/// inner products R[i][j] = <phi_i, phi_j>: each edge between rows i and j
/// contributes R[i][j].
double product_expectation_tensor(const std::vector<int>& arities,
                                  const std::vector<std::vector<double>>& inner);

/// E[H_m(xi)^p] for standard Gaussian xi via the complete-diagram sum with
/// edge weight r0 (p tensor copies of a rank-one kernel of norm r0).
double moment_hermite(int m, int p, double r0 = 1.0);

}  // namespace diagrams
}  // namespace chaoslab

#endif
