#pragma once

#include <utility>
#include <vector>

#include "qalt/linalg.hpp"
#include "qalt/rng.hpp"
#include "qalt/types.hpp"

namespace qalt {

/// Dense embedding of a small operator acting on `support` into the full
/// register: identity on all other sites.
template <class S>
HermitianOp<S> embed(const DenseMat<S>& small, const std::vector<int>& support,
                     const RegisterShape& shape);

/// out += small (x) identity acting on psi, using a precomputed plan.
void apply_local(const MatC& small, const EmbeddingPlan& plan, const VecC& in,
                 VecC& out);

/// Cross matrix C[s,s'] = sum_r conj(a[r,s]) b[r,s'] over the plan's support
/// factorization; <a| (M on support) |b> = sum_{s,s'} M[s,s'] C[s,s'] for any
/// small M. One cross matrix serves a whole operator basis on that support.
MatC cross_matrix(const EmbeddingPlan& plan, const VecC& a, const VecC& b);

/// Matrix-free application of a sum of local Hermitian terms.
class LocalApplier {
 public:
  LocalApplier(RegisterShape shape, const std::vector<LocalOperator>& terms);

  void apply(const VecC& in, VecC& out) const;  // out = H * in
  VecC apply(const VecC& in) const;
  const RegisterShape& shape() const { return shape_; }
  const std::vector<LocalOperator>& terms() const { return terms_; }
  const EmbeddingPlan& plan(std::size_t term) const { return plans_[term]; }

  /// Rough upper bound on the operator norm: sum of term spectral norms.
  double norm_bound() const;

 private:
  RegisterShape shape_;
  std::vector<LocalOperator> terms_;
  std::vector<EmbeddingPlan> plans_;
};

/// Born-rule measurement of `state` in an eigenbasis: returns (index, energy).
std::pair<std::int64_t, double> measure_in_basis(const StateVector& state,
                                                 const EigenSystemC& es,
                                                 RngStream& rng);

/// Reduced density matrix of a pure state on the given support sites.
MatC partial_trace_to_support(const StateVector& state,
                              const std::vector<int>& support);

/// Haar-random rank-1 projector inside the range of `p` (a projector on its
/// support): gaussian vector in an orthonormal basis of range(p), normalized.
Projector haar_in_range(const Projector& p, RngStream& rng);

/// Hermitian operator basis on a product of small sites: tensor products of
/// per-site bases (Pauli I,X,Y,Z for d=2; identity plus the eight Gell-Mann
/// matrices, rescaled to unit spectral norm, for d=3). Trace-orthogonal;
/// element 0 is the identity; every element has spectral norm <= 1.
std::vector<MatC> operator_basis(const std::vector<int>& dims);

extern template HermitianOp<double> embed<double>(const DenseMat<double>&,
                                                  const std::vector<int>&,
                                                  const RegisterShape&);
extern template HermitianOp<cplx> embed<cplx>(const DenseMat<cplx>&,
                                              const std::vector<int>&,
                                              const RegisterShape&);

}  // namespace qalt
