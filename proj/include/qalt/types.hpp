#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "qalt/register.hpp"

namespace qalt {

using cplx = std::complex<double>;
template <class S>
using DenseMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;

/// Numerical tolerances used by the validation layer.
struct Tol {
  static constexpr double hermiticity = 1e-10;     // max-norm of H - H^dag
  static constexpr double unitarity = 1e-8;        // max-norm of U^dag U - I
  static constexpr double reconstruction = 1e-8;   // relative Frobenius
  static constexpr double state_norm = 1e-10;      // | ||psi|| - 1 |
  static constexpr double idempotence = 1e-10;     // max-norm of P^2 - P
  static constexpr double projector_trace = 1e-8;  // | tr P - round(tr P) |
  static constexpr double psd_slack = -1e-8;       // min eigenvalue floor
};

namespace detail {
template <class S>
double max_abs(const DenseMat<S>& m) {
  return m.cwiseAbs().maxCoeff();
}
}  // namespace detail

/// Dense Hermitian operator on a register. Scalar is double for real
/// symmetric operators and std::complex<double> in general.
template <class S>
struct HermitianOp {
  RegisterShape shape;
  DenseMat<S> mat;

  void validate() const {
    if (mat.rows() != mat.cols() || mat.rows() != shape.total_dim)
      throw ValidationError("operator dimension does not match register");
    const double scale = std::max(1.0, detail::max_abs(mat));
    const double dev = detail::max_abs<S>(mat - mat.adjoint());
    if (dev > Tol::hermiticity * scale)
      throw ValidationError("operator is not Hermitian (max deviation " +
                            std::to_string(dev) + ")");
  }
};

using HermitianOperator = HermitianOp<cplx>;

/// Pure state on a register (unit norm).
struct StateVector {
  RegisterShape shape;
  VecC amp;

  void validate() const {
    if (amp.size() != shape.total_dim)
      throw ValidationError("state dimension does not match register");
    if (std::abs(amp.norm() - 1.0) > Tol::state_norm)
      throw ValidationError("state is not normalized");
  }
};

/// Hermitian operator supported on a few sites (stored as its small matrix).
struct LocalOperator {
  std::vector<int> support;  // strictly increasing site indices
  MatC mat;                  // sup_dim x sup_dim
};

/// Orthogonal projector on a site subset.
struct Projector {
  std::vector<int> support;
  MatC mat;
  int rank = 0;

  void validate() const {
    if (mat.rows() != mat.cols())
      throw ValidationError("projector matrix must be square");
    if (detail::max_abs<cplx>(mat * mat - mat) > Tol::idempotence)
      throw ValidationError("projector is not idempotent");
    const double tr = mat.trace().real();
    if (std::abs(tr - rank) > Tol::projector_trace)
      throw ValidationError("projector trace does not match rank");
  }
};

/// Eigendecomposition H = U diag(energy) U^dag with energies ascending.
/// When the matrix decomposed into disconnected index blocks, `index_block`
/// records the block id of every original basis index and `col_block` the
/// block each eigencolumn lives in (empty vectors mean a single block);
/// downstream overlap products exploit matching partitions.
template <class S>
struct EigenSystem {
  VecR energy;
  DenseMat<S> basis;  // columns are eigenvectors
  std::vector<int> index_block;
  std::vector<int> col_block;
  // Set when the basis is a permutation matrix (diagonal operators):
  // perm[col] = the basis index that column is supported on.
  std::vector<std::int64_t> perm;

  std::int64_t dim() const { return energy.size(); }
  bool blocked() const { return !index_block.empty(); }
  bool is_permutation() const { return !perm.empty(); }
};

using EigenSystemC = EigenSystem<cplx>;
using EigenSystemR = EigenSystem<double>;

/// Probability weights over the eigencolumns of some EigenSystem (the
/// diagonal of a density matrix in that basis). The basis itself travels
/// alongside in the calling code; `label` is bookkeeping for manifests.
struct ClassicalMixture {
  VecR w;
  std::string label;

  void validate() const {
    if ((w.array() < -1e-12).any())
      throw ValidationError("mixture has negative weight");
    if (std::abs(w.sum() - 1.0) > 1e-9)
      throw ValidationError("mixture weights must sum to 1");
  }
};

}  // namespace qalt
