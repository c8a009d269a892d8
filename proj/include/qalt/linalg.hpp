#pragma once

#include <functional>

#include "qalt/types.hpp"

namespace qalt {

struct SpectralOptions {
  /// Detect disconnected index blocks of the sparsity graph and diagonalize
  /// them independently (exact, and much faster when symmetries decouple the
  /// matrix). Entries below offdiag_rel_tol * max|H_ij| count as zero.
  bool block_split = true;
  double offdiag_rel_tol = 1e-14;
  bool check_hermitian = true;
};

/// Full eigendecomposition of a dense Hermitian operator (LAPACK
/// divide-and-conquer: dsyevd / zheevd). Eigenvalues ascending; on equal
/// eigenvalues the pre-sort column order is kept, so output is deterministic.
EigenSystem<double> spectral(const HermitianOp<double>& h,
                             const SpectralOptions& opt = {});
EigenSystem<cplx> spectral(const HermitianOp<cplx>& h,
                           const SpectralOptions& opt = {});

/// Overlap weights |<b_col | a_col>|^2 applied to a weight vector:
/// out[j] = sum_i |<b_j|a_i>|^2 w[i]. Uses per-block products when both
/// systems carry the same index partition, full GEMM otherwise.
VecR propagate_weights(const EigenSystem<double>& a,
                       const EigenSystem<double>& b, const VecR& w);
VecR propagate_weights(const EigenSystem<cplx>& a, const EigenSystem<cplx>& b,
                       const VecR& w);

/// Decomposition weights |<b_j | psi>|^2 of a vector in an eigenbasis.
VecR decompose_weights(const EigenSystem<double>& b, const VecC& psi);
VecR decompose_weights(const EigenSystem<cplx>& b, const VecC& psi);

/// y(theta) = exp(i * theta * G) * psi for a Hermitian G given only through
/// its action, via a Lanczos (Krylov) subspace with full reorthogonalization.
/// One build serves every theta with |theta| <= theta_max; `apply` must be
/// linear and Hermitian. Accuracy target ~1e-10 relative at theta_max.
class KrylovExp {
 public:
  KrylovExp(const std::function<void(const VecC&, VecC&)>& apply_g,
            const VecC& psi, double theta_max, int m_max = 400,
            double tol = 1e-10);

  VecC at(double theta) const;
  int dim() const { return m_; }

 private:
  MatC v_;       // D x m Lanczos basis
  VecR alpha_;   // tridiagonal diagonal
  VecR beta_;    // tridiagonal off-diagonal
  MatR evec_;    // eigenvectors of the tridiagonal
  VecR eval_;    // eigenvalues of the tridiagonal
  double norm_ = 1.0;
  int m_ = 0;
};

}  // namespace qalt
