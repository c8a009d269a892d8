#pragma once

// Small self-contained oracles shared by the unit suites. These deliberately
// avoid the library's own embedding/assembly code paths so the tests compare
// two independent implementations.

#include <cmath>
#include <complex>
#include <vector>

#include "qalt/rng.hpp"
#include "qalt/types.hpp"

namespace oracles {

using qalt::cplx;
using qalt::MatC;
using qalt::VecC;

// Dense embedding by explicit index arithmetic: walks every pair of full
// register indices, multiplying matrix elements of `small` on the support
// sites and Kronecker deltas elsewhere.
inline MatC kron_embed(const MatC& small, const std::vector<int>& support,
                       const std::vector<int>& dims) {
  const int n = static_cast<int>(dims.size());
  std::int64_t total = 1;
  for (int d : dims) total *= d;
  std::vector<std::int64_t> stride(dims.size(), 1);
  for (int i = n - 2; i >= 0; --i)
    stride[static_cast<std::size_t>(i)] =
        stride[static_cast<std::size_t>(i + 1)] * dims[static_cast<std::size_t>(i + 1)];

  const auto digits = [&](std::int64_t idx) {
    std::vector<int> out(dims.size());
    for (int i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] =
          static_cast<int>(idx / stride[static_cast<std::size_t>(i)]);
      idx %= stride[static_cast<std::size_t>(i)];
    }
    return out;
  };

  MatC out = MatC::Zero(total, total);
  for (std::int64_t r = 0; r < total; ++r) {
    const auto dr = digits(r);
    for (std::int64_t c = 0; c < total; ++c) {
      const auto dc = digits(c);
      bool delta = true;
      for (int i = 0; i < n && delta; ++i) {
        bool on_support = false;
        for (int s : support) on_support |= (s == i);
        if (!on_support && dr[static_cast<std::size_t>(i)] != dc[static_cast<std::size_t>(i)])
          delta = false;
      }
      if (!delta) continue;
      std::int64_t sr = 0, sc = 0;
      for (int s : support) {
        sr = sr * dims[static_cast<std::size_t>(s)] + dr[static_cast<std::size_t>(s)];
        sc = sc * dims[static_cast<std::size_t>(s)] + dc[static_cast<std::size_t>(s)];
      }
      out(r, c) = small(sr, sc);
    }
  }
  return out;
}

inline MatC random_hermitian(std::int64_t d, qalt::RngStream& rng) {
  MatC a(d, d);
  for (std::int64_t i = 0; i < d; ++i)
    for (std::int64_t j = 0; j < d; ++j) a(i, j) = rng.gaussian_complex();
  return 0.5 * (a + a.adjoint()).eval();
}

inline VecC random_state(std::int64_t d, qalt::RngStream& rng) {
  VecC v(d);
  for (std::int64_t i = 0; i < d; ++i) v[i] = rng.gaussian_complex();
  v.normalize();
  return v;
}

// Upper chi-square quantile at significance 1e-3 (Wilson-Hilferty cube
// approximation, z_{0.999} = 3.0902): accurate to ~1% for df >= 3, which is
// all the slack these goodness-of-fit gates need.
inline double chi2_crit_1e3(int df) {
  const double z = 3.0902;
  const double d = static_cast<double>(df);
  const double t = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
  return d * t * t * t;
}

struct MeanAccumulator {
  double sum = 0.0, sumsq = 0.0;
  std::int64_t n = 0;
  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double stderr_mean() const {
    const double m = mean();
    const double var = (sumsq / static_cast<double>(n) - m * m) *
                       static_cast<double>(n) / static_cast<double>(n - 1);
    return std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
  }
};

}  // namespace oracles
