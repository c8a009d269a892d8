#pragma once

#include "qalt/models.hpp"
#include "qalt/rng.hpp"
#include "qalt/types.hpp"

namespace qalt {

/// One Haar-random rank-1 alteration per projector term of a LocalHamiltonian.
struct LocalAlteration {
  std::vector<Projector> phis;
};

/// Samples phi_i uniformly (Haar) inside range(P_i) for every term.
LocalAlteration sample_local_alteration(const LocalHamiltonian& h,
                                        RngStream& rng);

/// Dense sum_i (P_i + phi_i). The base Hamiltonian's identity offset is not
/// included: the altered operator is defined from the projector terms alone.
HermitianOp<cplx> assemble_altered(const LocalHamiltonian& h,
                                   const LocalAlteration& a);

/// The same operator as local terms (P_i + phi_i), for matrix-free use.
std::vector<LocalOperator> altered_term_ops(const LocalHamiltonian& h,
                                            const LocalAlteration& a);

enum class PatternKind { band, hamming };

/// Sparsity pattern T over a D-dimensional index space.
struct SparsityPattern {
  PatternKind kind = PatternKind::band;
  int t = 0;            // band half-width (band kind only)
  std::int64_t dim = 0; // index-space dimension; power of two for hamming
};

SparsityPattern band_pattern(int t, std::int64_t dim);
SparsityPattern hamming_pattern(int n_bits);

/// Sorted row indices alpha with T_{alpha,beta} = 1. Band: |alpha - beta| <= t
/// clipped to the index range (the diagonal included); Hamming: the single
/// bit-flip neighbors of beta. t_beta is the returned list's length.
std::vector<std::int64_t> pattern_columns(const SparsityPattern& p,
                                          std::int64_t beta);

/// Column-sparse gaussian perturbation W: for column beta, `rows` follows
/// pattern_columns order and f holds the sampled entries.
struct SparseAlteration {
  SparsityPattern pattern;
  std::vector<std::vector<double>> f;  // f[beta][k] at row pattern_columns[k]

  /// w = W * psi and w = W^dag * u for real or complex vectors.
  template <class Vec>
  Vec apply_w(const Vec& psi) const {
    Vec out = Vec::Zero(pattern.dim);
    for (std::int64_t b = 0; b < pattern.dim; ++b) {
      if (f[static_cast<std::size_t>(b)].empty()) continue;
      const auto rows = pattern_columns(pattern, b);
      const auto& col = f[static_cast<std::size_t>(b)];
      for (std::size_t k = 0; k < rows.size(); ++k)
        out[rows[k]] += col[k] * psi[b];
    }
    return out;
  }
  template <class Vec>
  Vec apply_w_adjoint(const Vec& u) const {
    Vec out = Vec::Zero(pattern.dim);
    for (std::int64_t b = 0; b < pattern.dim; ++b) {
      if (f[static_cast<std::size_t>(b)].empty()) continue;
      const auto rows = pattern_columns(pattern, b);
      const auto& col = f[static_cast<std::size_t>(b)];
      for (std::size_t k = 0; k < rows.size(); ++k)
        out[b] += col[k] * u[rows[k]];
    }
    return out;
  }
};

/// Independent gaussians f_{alpha,beta} ~ N(0, E_beta / t_beta) at every
/// pattern position; columns with E_beta = 0 are identically zero. Energies
/// must be non-negative (classical bases are shifted to ground energy 0
/// before calling).
SparseAlteration sample_sparse_alteration(const VecR& energies,
                                          const SparsityPattern& p,
                                          RngStream& rng);

/// Dense H + W^dag W over the computational basis of a diagonal base.
HermitianOp<double> assemble_sparse_altered(const DiagonalLandscape& base,
                                            const SparseAlteration& s);

/// General base: diag(E) + W^dag W in the eigenbasis, rotated back to the
/// original basis (U M U^dag). The register shape of the original space is
/// supplied by the caller (an EigenSystem carries no shape).
HermitianOp<double> assemble_sparse_altered(const EigenSystem<double>& base,
                                            const RegisterShape& shape,
                                            const SparseAlteration& s);
HermitianOp<cplx> assemble_sparse_altered(const EigenSystem<cplx>& base,
                                          const RegisterShape& shape,
                                          const SparseAlteration& s);

/// The W^dag W part alone, in the pattern's index space.
MatR gram_of_w(const SparseAlteration& s);

}  // namespace qalt
