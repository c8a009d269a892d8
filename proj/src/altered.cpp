#include "qalt/altered.hpp"

#include <algorithm>

namespace qalt {

LocalAlteration sample_local_alteration(const LocalHamiltonian& h,
                                        RngStream& rng) {
  LocalAlteration a;
  a.phis.reserve(h.terms.size());
  for (const auto& term : h.terms) a.phis.push_back(haar_in_range(term, rng));
  return a;
}

HermitianOp<cplx> assemble_altered(const LocalHamiltonian& h,
                                   const LocalAlteration& a) {
  if (a.phis.size() != h.terms.size())
    throw ValidationError("assemble_altered: alteration/term count mismatch");
  HermitianOp<cplx> out{h.shape,
                        MatC::Zero(h.shape.total_dim, h.shape.total_dim)};
  for (std::size_t i = 0; i < h.terms.size(); ++i) {
    const MatC small = h.terms[i].mat + a.phis[i].mat;
    const auto e = embed<cplx>(small, h.terms[i].support, h.shape);
    out.mat += e.mat;
  }
  return out;
}

std::vector<LocalOperator> altered_term_ops(const LocalHamiltonian& h,
                                            const LocalAlteration& a) {
  if (a.phis.size() != h.terms.size())
    throw ValidationError("altered_term_ops: alteration/term count mismatch");
  std::vector<LocalOperator> ops;
  ops.reserve(h.terms.size());
  for (std::size_t i = 0; i < h.terms.size(); ++i)
    ops.push_back({h.terms[i].support, h.terms[i].mat + a.phis[i].mat});
  return ops;
}

SparsityPattern band_pattern(int t, std::int64_t dim) {
  if (t < 0 || dim < 1) throw ValidationError("band_pattern: bad parameters");
  return {PatternKind::band, t, dim};
}

SparsityPattern hamming_pattern(int n_bits) {
  if (n_bits < 1) throw ValidationError("hamming_pattern: bad parameters");
  return {PatternKind::hamming, 0, std::int64_t{1} << n_bits};
}

std::vector<std::int64_t> pattern_columns(const SparsityPattern& p,
                                          std::int64_t beta) {
  if (beta < 0 || beta >= p.dim)
    throw ValidationError("pattern_columns: index out of range");
  std::vector<std::int64_t> rows;
  if (p.kind == PatternKind::band) {
    const std::int64_t lo = std::max<std::int64_t>(0, beta - p.t);
    const std::int64_t hi = std::min<std::int64_t>(p.dim - 1, beta + p.t);
    rows.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t a = lo; a <= hi; ++a) rows.push_back(a);
  } else {
    for (std::int64_t bit = 1; bit < p.dim; bit <<= 1)
      rows.push_back(beta ^ bit);
    std::sort(rows.begin(), rows.end());
  }
  return rows;
}

SparseAlteration sample_sparse_alteration(const VecR& energies,
                                          const SparsityPattern& p,
                                          RngStream& rng) {
  if (energies.size() != p.dim)
    throw ValidationError("sample_sparse_alteration: dimension mismatch");
  if ((energies.array() < 0.0).any())
    throw ValidationError("sample_sparse_alteration: negative energy");
  SparseAlteration s;
  s.pattern = p;
  s.f.resize(static_cast<std::size_t>(p.dim));
  for (std::int64_t b = 0; b < p.dim; ++b) {
    if (energies[b] == 0.0) continue;  // zero column: ground space untouched
    const auto rows = pattern_columns(p, b);
    const double sigma =
        std::sqrt(energies[b] / static_cast<double>(rows.size()));
    auto& col = s.f[static_cast<std::size_t>(b)];
    col.resize(rows.size());
    for (double& v : col) v = sigma * rng.gaussian();
  }
  return s;
}

MatR gram_of_w(const SparseAlteration& s) {
  const std::int64_t d = s.pattern.dim;
  // Row-wise accumulation of W^dag W: every row alpha of W contributes the
  // outer product of its nonzeros.
  std::vector<std::vector<std::pair<std::int64_t, double>>> row_entries(
      static_cast<std::size_t>(d));
  for (std::int64_t b = 0; b < d; ++b) {
    const auto& col = s.f[static_cast<std::size_t>(b)];
    if (col.empty()) continue;
    const auto rows = pattern_columns(s.pattern, b);
    for (std::size_t k = 0; k < rows.size(); ++k)
      row_entries[static_cast<std::size_t>(rows[k])].push_back({b, col[k]});
  }
  MatR m = MatR::Zero(d, d);
  for (const auto& row : row_entries)
    for (const auto& [bi, fi] : row)
      for (const auto& [bj, fj] : row) m(bi, bj) += fi * fj;
  return m;
}

HermitianOp<double> assemble_sparse_altered(const DiagonalLandscape& base,
                                            const SparseAlteration& s) {
  if (base.dim() != s.pattern.dim)
    throw ValidationError("assemble_sparse_altered: dimension mismatch");
  HermitianOp<double> out{RegisterShape::qubits(base.n_bits), gram_of_w(s)};
  out.mat.diagonal() += base.e;
  return out;
}

HermitianOp<double> assemble_sparse_altered(const EigenSystem<double>& base,
                                            const RegisterShape& shape,
                                            const SparseAlteration& s) {
  if (base.dim() != s.pattern.dim || shape.total_dim != base.dim())
    throw ValidationError("assemble_sparse_altered: dimension mismatch");
  MatR m = gram_of_w(s);
  m.diagonal() += base.energy;
  return {shape, base.basis * m * base.basis.transpose()};
}

HermitianOp<cplx> assemble_sparse_altered(const EigenSystem<cplx>& base,
                                          const RegisterShape& shape,
                                          const SparseAlteration& s) {
  if (base.dim() != s.pattern.dim || shape.total_dim != base.dim())
    throw ValidationError("assemble_sparse_altered: dimension mismatch");
  MatR m = gram_of_w(s);
  m.diagonal() += base.energy;
  return {shape, base.basis * m.cast<cplx>() * base.basis.adjoint()};
}

}  // namespace qalt
