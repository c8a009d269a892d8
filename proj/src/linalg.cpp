#include "qalt/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <numeric>

namespace qalt {
namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::int64_t n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

/// Connected components of the off-diagonal sparsity graph, labeled 0,1,...
/// in order of first appearance. Returns an empty vector when everything is
/// one component (the common case, kept allocation-free downstream).
template <class S>
std::vector<int> sparsity_blocks(const DenseMat<S>& m, double rel_tol) {
  const std::int64_t n = m.rows();
  const double tol = rel_tol * std::max(1e-300, detail::max_abs(m));
  UnionFind uf(n);
  for (std::int64_t j = 0; j < n; ++j)
    for (std::int64_t i = j + 1; i < n; ++i)
      if (std::abs(m(i, j)) > tol || std::abs(m(j, i)) > tol)
        uf.unite(static_cast<int>(i), static_cast<int>(j));
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const int root = uf.find(static_cast<int>(i));
    if (label[static_cast<std::size_t>(root)] < 0)
      label[static_cast<std::size_t>(root)] = next++;
    label[static_cast<std::size_t>(i)] = label[static_cast<std::size_t>(root)];
  }
  if (next == 1) return {};
  return label;
}

void heev_inplace(MatR& a, VecR& w) {
  const auto n = static_cast<lapack_int>(a.rows());
  w.resize(n);
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data());
  if (info != 0)
    throw NumericalError("dsyevd failed with info " + std::to_string(info));
}

void heev_inplace(MatC& a, VecR& w) {
  const auto n = static_cast<lapack_int>(a.rows());
  w.resize(n);
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'V', 'L', n,
      reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data());
  if (info != 0)
    throw NumericalError("zheevd failed with info " + std::to_string(info));
}

template <class S>
EigenSystem<S> spectral_impl(const HermitianOp<S>& h,
                             const SpectralOptions& opt) {
  if (opt.check_hermitian) h.validate();
  const std::int64_t n = h.mat.rows();
  EigenSystem<S> out;

  std::vector<int> label;
  if (opt.block_split) label = sparsity_blocks(h.mat, opt.offdiag_rel_tol);

  if (label.empty()) {
    out.basis = h.mat;
    heev_inplace(out.basis, out.energy);
    return out;
  }

  const int n_blocks = 1 + *std::max_element(label.begin(), label.end());
  std::vector<std::vector<std::int64_t>> members(
      static_cast<std::size_t>(n_blocks));
  for (std::int64_t i = 0; i < n; ++i)
    members[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])]
        .push_back(i);

  // Diagonalize each block, then merge eigenpairs by a stable energy sort so
  // ties keep block-major order (deterministic output).
  struct Pair {
    double e;
    int block;
    std::int64_t local;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  std::vector<DenseMat<S>> vecs(static_cast<std::size_t>(n_blocks));
  for (int b = 0; b < n_blocks; ++b) {
    const auto& idx = members[static_cast<std::size_t>(b)];
    const auto nb = static_cast<std::int64_t>(idx.size());
    DenseMat<S> sub(nb, nb);
    for (std::int64_t j = 0; j < nb; ++j)
      for (std::int64_t i = 0; i < nb; ++i)
        sub(i, j) = h.mat(idx[static_cast<std::size_t>(i)],
                          idx[static_cast<std::size_t>(j)]);
    VecR w;
    heev_inplace(sub, w);
    vecs[static_cast<std::size_t>(b)] = std::move(sub);
    for (std::int64_t c = 0; c < nb; ++c) pairs.push_back({w[c], b, c});
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& x, const Pair& y) { return x.e < y.e; });

  out.energy.resize(n);
  out.basis = DenseMat<S>::Zero(n, n);
  out.index_block = label;
  out.col_block.resize(static_cast<std::size_t>(n));
  for (std::int64_t c = 0; c < n; ++c) {
    const auto& p = pairs[static_cast<std::size_t>(c)];
    out.energy[c] = p.e;
    out.col_block[static_cast<std::size_t>(c)] = p.block;
    const auto& idx = members[static_cast<std::size_t>(p.block)];
    const auto& v = vecs[static_cast<std::size_t>(p.block)];
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(idx.size()); ++i)
      out.basis(idx[static_cast<std::size_t>(i)], c) = v(i, p.local);
  }
  return out;
}

template <class S>
VecR propagate_impl(const EigenSystem<S>& a, const EigenSystem<S>& b,
                    const VecR& w) {
  if (a.dim() != b.dim() || w.size() != a.dim())
    throw ValidationError("propagate_weights: dimension mismatch");
  const std::int64_t n = a.dim();
  if (a.is_permutation()) {
    // Columns of `a` are basis vectors: route weights to basis indices and
    // contract against |b|^2 rows directly (one GEMV instead of a GEMM).
    VecR q = VecR::Zero(n);
    for (std::int64_t c = 0; c < n; ++c)
      q[a.perm[static_cast<std::size_t>(c)]] += w[c];
    if (b.is_permutation()) {
      VecR out(n);
      for (std::int64_t c = 0; c < n; ++c)
        out[c] = q[b.perm[static_cast<std::size_t>(c)]];
      return out;
    }
    return b.basis.cwiseAbs2().transpose() * q;
  }
  if (b.is_permutation()) {
    const VecR byindex = a.basis.cwiseAbs2() * w;
    VecR out(n);
    for (std::int64_t c = 0; c < n; ++c)
      out[c] = byindex[b.perm[static_cast<std::size_t>(c)]];
    return out;
  }
  if (a.blocked() && b.blocked() && a.index_block == b.index_block) {
    const int n_blocks =
        1 + *std::max_element(a.index_block.begin(), a.index_block.end());
    std::vector<std::vector<std::int64_t>> rows(
        static_cast<std::size_t>(n_blocks)),
        cols_a(static_cast<std::size_t>(n_blocks)),
        cols_b(static_cast<std::size_t>(n_blocks));
    for (std::int64_t i = 0; i < n; ++i) {
      rows[static_cast<std::size_t>(a.index_block[static_cast<std::size_t>(i)])]
          .push_back(i);
      cols_a[static_cast<std::size_t>(a.col_block[static_cast<std::size_t>(i)])]
          .push_back(i);
      cols_b[static_cast<std::size_t>(b.col_block[static_cast<std::size_t>(i)])]
          .push_back(i);
    }
    VecR out = VecR::Zero(n);
    for (int k = 0; k < n_blocks; ++k) {
      const auto& r = rows[static_cast<std::size_t>(k)];
      const auto& ca = cols_a[static_cast<std::size_t>(k)];
      const auto& cb = cols_b[static_cast<std::size_t>(k)];
      const auto nr = static_cast<std::int64_t>(r.size());
      DenseMat<S> sa(nr, static_cast<std::int64_t>(ca.size()));
      DenseMat<S> sb(nr, static_cast<std::int64_t>(cb.size()));
      for (std::size_t j = 0; j < ca.size(); ++j)
        for (std::int64_t i = 0; i < nr; ++i)
          sa(i, static_cast<std::int64_t>(j)) =
              a.basis(r[static_cast<std::size_t>(i)], ca[j]);
      for (std::size_t j = 0; j < cb.size(); ++j)
        for (std::int64_t i = 0; i < nr; ++i)
          sb(i, static_cast<std::int64_t>(j)) =
              b.basis(r[static_cast<std::size_t>(i)], cb[j]);
      VecR wa(static_cast<std::int64_t>(ca.size()));
      for (std::size_t j = 0; j < ca.size(); ++j)
        wa[static_cast<std::int64_t>(j)] = w[ca[j]];
      DenseMat<S> ov = sb.adjoint() * sa;
      VecR wb = ov.cwiseAbs2() * wa;
      for (std::size_t j = 0; j < cb.size(); ++j) out[cb[j]] = wb[static_cast<std::int64_t>(j)];
    }
    return out;
  }
  DenseMat<S> ov = b.basis.adjoint() * a.basis;
  return ov.cwiseAbs2() * w;
}

}  // namespace

EigenSystem<double> spectral(const HermitianOp<double>& h,
                             const SpectralOptions& opt) {
  return spectral_impl(h, opt);
}
EigenSystem<cplx> spectral(const HermitianOp<cplx>& h,
                           const SpectralOptions& opt) {
  return spectral_impl(h, opt);
}

VecR propagate_weights(const EigenSystem<double>& a,
                       const EigenSystem<double>& b, const VecR& w) {
  return propagate_impl(a, b, w);
}
VecR propagate_weights(const EigenSystem<cplx>& a, const EigenSystem<cplx>& b,
                       const VecR& w) {
  return propagate_impl(a, b, w);
}

namespace {

template <class S>
VecR decompose_perm(const EigenSystem<S>& b, const VecC& psi) {
  VecR out(b.dim());
  for (std::int64_t c = 0; c < b.dim(); ++c)
    out[c] = std::norm(psi[b.perm[static_cast<std::size_t>(c)]]);
  return out;
}

}  // namespace

VecR decompose_weights(const EigenSystem<double>& b, const VecC& psi) {
  if (psi.size() != b.dim())
    throw ValidationError("decompose_weights: dimension mismatch");
  if (b.is_permutation()) return decompose_perm(b, psi);
  const VecR re = b.basis.transpose() * psi.real();
  const VecR im = b.basis.transpose() * psi.imag();
  return re.cwiseAbs2() + im.cwiseAbs2();
}
VecR decompose_weights(const EigenSystem<cplx>& b, const VecC& psi) {
  if (psi.size() != b.dim())
    throw ValidationError("decompose_weights: dimension mismatch");
  if (b.is_permutation()) return decompose_perm(b, psi);
  const VecC v = b.basis.adjoint() * psi;
  return v.cwiseAbs2();
}

KrylovExp::KrylovExp(const std::function<void(const VecC&, VecC&)>& apply_g,
                     const VecC& psi, double theta_max, int m_max, double tol) {
  const std::int64_t d = psi.size();
  norm_ = psi.norm();
  if (norm_ <= 0.0) throw ValidationError("KrylovExp: zero input vector");
  const int cap = static_cast<int>(std::min<std::int64_t>(m_max, d));
  v_.resize(d, cap);
  alpha_.resize(cap);
  beta_.resize(cap);
  v_.col(0) = psi / norm_;
  VecC w(d);

  Eigen::SelfAdjointEigenSolver<MatR> solver;
  const auto tridiag_error = [&](int m) {
    // Residual estimate for exp(i*theta_max*T): beta_m * |last entry of
    // exp(i*theta_max*T) e_1| in the Lanczos basis.
    solver.computeFromTridiagonal(alpha_.head(m), beta_.head(m - 1));
    cplx last = 0.0;
    for (int k = 0; k < m; ++k)
      last += solver.eigenvectors()(m - 1, k) *
              std::exp(cplx(0.0, theta_max * solver.eigenvalues()[k])) *
              solver.eigenvectors()(0, k);
    return beta_[m - 1] * std::abs(last);
  };

  bool converged = false;
  for (int j = 0; j < cap; ++j) {
    apply_g(v_.col(j), w);
    alpha_[j] = v_.col(j).dot(w).real();
    w -= alpha_[j] * v_.col(j);
    if (j > 0) w -= beta_[j - 1] * v_.col(j - 1);
    // Full reorthogonalization, two passes; Lanczos loses orthogonality fast
    // and the basis here is small enough for this to be cheap.
    for (int pass = 0; pass < 2; ++pass) {
      const VecC proj = v_.leftCols(j + 1).adjoint() * w;
      w -= v_.leftCols(j + 1) * proj;
    }
    beta_[j] = w.norm();
    m_ = j + 1;
    if (beta_[j] < 1e-13) {
      converged = true;  // exact invariant subspace
      break;
    }
    if ((m_ % 8 == 0 || j + 1 == cap) &&
        tridiag_error(m_) < tol * std::max(1.0, std::abs(theta_max))) {
      converged = true;
      break;
    }
    if (j + 1 < cap) v_.col(j + 1) = w / beta_[j];
  }
  if (!converged && tridiag_error(m_) >= 1e-6)
    throw NumericalError("KrylovExp did not converge at subspace size " +
                         std::to_string(m_));
  solver.computeFromTridiagonal(alpha_.head(m_),
                                beta_.head(std::max(0, m_ - 1)));
  eval_ = solver.eigenvalues();
  evec_ = solver.eigenvectors();
}

VecC KrylovExp::at(double theta) const {
  VecC c = VecC::Zero(m_);
  for (int k = 0; k < m_; ++k) {
    const cplx phase = std::exp(cplx(0.0, theta * eval_[k])) * evec_(0, k);
    for (int i = 0; i < m_; ++i) c[i] += evec_(i, k) * phase;
  }
  return norm_ * (v_.leftCols(m_) * c);
}

}  // namespace qalt
