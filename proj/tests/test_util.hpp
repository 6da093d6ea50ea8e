// Shared test-side oracles, independent of the library paths they check.
#ifndef CHAOSLAB_TEST_UTIL_HPP
#define CHAOSLAB_TEST_UTIL_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "chaoslab/diagrams.hpp"
#include "chaoslab/gauss_hermite.hpp"
#include "chaoslab/rng.hpp"

namespace testutil {

/// Hermitian kernel with independent values per mirror pair of tuples.
inline chaoslab::diagrams::GridKernel random_hermitian_kernel(
    std::shared_ptr<const chaoslab::chaos::RegularSystem> sys, int arity,
    const chaoslab::CounterRng& rng, std::uint64_t tag) {
  chaoslab::diagrams::GridKernel k(sys, arity);
  const int M = sys->pairs();
  std::vector<int> idx(arity), neg(arity);
  std::vector<bool> done(k.flat_size(), false);
  std::size_t flat = 0;
  const auto flat_of = [&](const std::vector<int>& t) {
    std::size_t f = 0;
    for (int a = 0; a < arity; ++a) {
      const int slot = t[a] < 0 ? t[a] + M : M + t[a] - 1;
      f = f * (2 * M) + static_cast<std::size_t>(slot);
    }
    return f;
  };
  k.for_each_tuple([&](std::span<const int> t, std::complex<double>) {
    const std::size_t self = flat;
    ++flat;
    if (done[self]) return;
    for (int a = 0; a < arity; ++a) {
      idx[a] = t[a];
      neg[a] = -t[a];
    }
    const std::size_t mirror = flat_of(neg);
    const double re = rng.normal(tag, self, 0);
    const double im = rng.normal(tag, self, 1);
    k.set_value(idx, {re, im});
    k.set_value(neg, {re, -im});
    done[self] = true;
    done[mirror] = true;
  });
  return k;
}

/// E[prod_i n_i! I(h_i)] by the Wick pairing theorem applied to the complex
/// Gaussian cell variables: sum over all perfect matchings of the slots,
/// with E[Z_a Z_b] = G_{|j|} iff j_b = -j_a, and the per-kernel diagonal
/// exclusion of the discrete integrals.
inline double isserlis_product_expectation(
    const std::vector<chaoslab::diagrams::GridKernel>& kernels) {
  const auto sys = kernels[0].system();
  const int M = sys->pairs();
  std::vector<int> row_of, offset;
  int total = 0;
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    offset.push_back(total);
    for (int a = 0; a < kernels[i].arity(); ++a) row_of.push_back(static_cast<int>(i));
    total += kernels[i].arity();
  }
  if (total % 2 != 0) return 0.0;

  std::vector<int> slot_idx(total, 0);
  std::vector<int> mate(total, -1);
  std::complex<double> acc = 0;

  const std::function<void(int)> assign = [&](int pair) {
    // find first unmated slot
    int a = 0;
    while (a < total && mate[a] >= 0) ++a;
    if (a == total) {
      // sum over one signed index per matched pair
      std::vector<std::pair<int, int>> pairs;
      std::vector<bool> seen(total, false);
      for (int s = 0; s < total; ++s) {
        if (seen[s]) continue;
        seen[s] = true;
        seen[mate[s]] = true;
        pairs.emplace_back(s, mate[s]);
      }
      const int np = static_cast<int>(pairs.size());
      std::vector<int> choice(np, -M);
      while (true) {
        bool ok = true;
        double gw = 1.0;
        for (int p = 0; p < np && ok; ++p) {
          if (choice[p] == 0) { ok = false; break; }
          slot_idx[pairs[p].first] = choice[p];
          slot_idx[pairs[p].second] = -choice[p];
          gw *= sys->mass_of(choice[p]);
        }
        if (ok) {
          // per-kernel admissibility and value product
          std::complex<double> w = gw;
          for (std::size_t i = 0; i < kernels.size() && w != std::complex<double>(0.0); ++i) {
            const int n = kernels[i].arity();
            std::vector<int> args(slot_idx.begin() + offset[i],
                                  slot_idx.begin() + offset[i] + n);
            bool adm = true;
            for (int x = 0; x < n && adm; ++x)
              for (int y = x + 1; y < n; ++y)
                if (std::abs(args[x]) == std::abs(args[y])) { adm = false; break; }
            w = adm ? w * kernels[i].value(args) : std::complex<double>(0.0);
          }
          acc += w;
        }
        int p = np - 1;
        while (p >= 0) {
          ++choice[p];
          if (choice[p] == 0) ++choice[p];
          if (choice[p] <= M) break;
          choice[p] = -M;
          --p;
        }
        if (p < 0) break;
      }
      return;
    }
    for (int b = a + 1; b < total; ++b) {
      if (mate[b] >= 0) continue;
      mate[a] = b;
      mate[b] = a;
      assign(pair + 1);
      mate[a] = -1;
      mate[b] = -1;
    }
  };
  assign(0);
  return acc.real();
}

/// Brute-force diagram count: every subset of admissible cross-row vertex
/// pairs that is vertex-disjoint.
inline long brute_force_diagram_count(const std::vector<int>& order) {
  std::vector<int> row;
  for (std::size_t r = 0; r < order.size(); ++r)
    for (int i = 0; i < order[r]; ++i) row.push_back(static_cast<int>(r));
  const int n = static_cast<int>(row.size());
  std::vector<std::pair<int, int>> cand;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (row[a] != row[b]) cand.emplace_back(a, b);
  const int p = static_cast<int>(cand.size());
  long count = 0;
  for (long mask = 0; mask < (1l << p); ++mask) {
    unsigned used = 0;
    bool ok = true;
    for (int e = 0; e < p && ok; ++e) {
      if (!(mask & (1l << e))) continue;
      const unsigned bits = (1u << cand[e].first) | (1u << cand[e].second);
      if (used & bits) ok = false;
      used |= bits;
    }
    if (ok) ++count;
  }
  return count;
}

/// P(|xi^2 - 1| > x) for standard Gaussian xi (chi-square tail oracle).
inline double chisq_centered_tail(double x) {
  const auto phi_bar = [](double t) { return 0.5 * std::erfc(t / std::sqrt(2.0)); };
  double p = 2.0 * phi_bar(std::sqrt(1.0 + x));
  if (x < 1.0)
    p += 1.0 - 2.0 * phi_bar(std::sqrt(1.0 - x));
  return p;
}

/// Exact P(|H_m(xi)| > x) for m <= 3 (m = 3 valid above the local extremum).
inline double exact_hermite_survival(int m, double x) {
  const auto phi_bar = [](double t) { return 0.5 * std::erfc(t / std::sqrt(2.0)); };
  if (m == 1) return 2.0 * phi_bar(x);
  if (m == 2) return chisq_centered_tail(x);
  if (m == 3 && x > 2.0) {
    double t = std::cbrt(x) + 1.0;  // positive root of t^3 - 3t = x
    for (int it = 0; it < 60; ++it) t -= (t * t * t - 3 * t - x) / (3 * t * t - 3);
    return 2.0 * phi_bar(t);
  }
  throw std::invalid_argument("exact_hermite_survival: unsupported order/range");
}

}  // namespace testutil

#endif
