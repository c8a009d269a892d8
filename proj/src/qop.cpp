#include "qalt/qop.hpp"

#include <Eigen/Eigenvalues>

namespace qalt {

template <class S>
HermitianOp<S> embed(const DenseMat<S>& small, const std::vector<int>& support,
                     const RegisterShape& shape) {
  const EmbeddingPlan plan(shape, support);
  if (small.rows() != plan.sup_dim() || small.cols() != plan.sup_dim())
    throw ValidationError("embed: small operator does not match support");
  HermitianOp<S> out{shape, DenseMat<S>::Zero(shape.total_dim, shape.total_dim)};
  for (std::int64_t r = 0; r < plan.rest_dim(); ++r) {
    const std::int64_t base = plan.base(r);
    for (std::int64_t sc = 0; sc < plan.sup_dim(); ++sc)
      for (std::int64_t sr = 0; sr < plan.sup_dim(); ++sr)
        out.mat(base + plan.offset(sr), base + plan.offset(sc)) += small(sr, sc);
  }
  return out;
}

template HermitianOp<double> embed<double>(const DenseMat<double>&,
                                           const std::vector<int>&,
                                           const RegisterShape&);
template HermitianOp<cplx> embed<cplx>(const DenseMat<cplx>&,
                                       const std::vector<int>&,
                                       const RegisterShape&);

void apply_local(const MatC& small, const EmbeddingPlan& plan, const VecC& in,
                 VecC& out) {
  const std::int64_t ds = plan.sup_dim();
  static thread_local std::vector<cplx> gather;
  gather.resize(static_cast<std::size_t>(ds));
  for (std::int64_t r = 0; r < plan.rest_dim(); ++r) {
    const std::int64_t base = plan.base(r);
    for (std::int64_t s = 0; s < ds; ++s)
      gather[static_cast<std::size_t>(s)] = in[base + plan.offset(s)];
    for (std::int64_t s = 0; s < ds; ++s) {
      cplx acc = 0.0;
      for (std::int64_t t = 0; t < ds; ++t)
        acc += small(s, t) * gather[static_cast<std::size_t>(t)];
      out[base + plan.offset(s)] += acc;
    }
  }
}

MatC cross_matrix(const EmbeddingPlan& plan, const VecC& a, const VecC& b) {
  const std::int64_t ds = plan.sup_dim();
  MatC c = MatC::Zero(ds, ds);
  for (std::int64_t r = 0; r < plan.rest_dim(); ++r) {
    const std::int64_t base = plan.base(r);
    for (std::int64_t s = 0; s < ds; ++s) {
      const cplx as = std::conj(a[base + plan.offset(s)]);
      if (as == cplx(0.0)) continue;
      for (std::int64_t t = 0; t < ds; ++t)
        c(s, t) += as * b[base + plan.offset(t)];
    }
  }
  return c;
}

LocalApplier::LocalApplier(RegisterShape shape,
                           const std::vector<LocalOperator>& terms)
    : shape_(std::move(shape)), terms_(terms) {
  plans_.reserve(terms_.size());
  for (const auto& t : terms_) plans_.emplace_back(shape_, t.support);
}

void LocalApplier::apply(const VecC& in, VecC& out) const {
  out.setZero();
  for (std::size_t i = 0; i < terms_.size(); ++i)
    apply_local(terms_[i].mat, plans_[i], in, out);
}

VecC LocalApplier::apply(const VecC& in) const {
  VecC out(in.size());
  apply(in, out);
  return out;
}

double LocalApplier::norm_bound() const {
  double bound = 0.0;
  for (const auto& t : terms_) {
    Eigen::SelfAdjointEigenSolver<MatC> s(t.mat, Eigen::EigenvaluesOnly);
    bound += std::max(std::abs(s.eigenvalues().minCoeff()),
                      std::abs(s.eigenvalues().maxCoeff()));
  }
  return bound;
}

std::pair<std::int64_t, double> measure_in_basis(const StateVector& state,
                                                 const EigenSystemC& es,
                                                 RngStream& rng) {
  if (state.amp.size() != es.dim())
    throw ValidationError("measure_in_basis: dimension mismatch");
  VecR p = decompose_weights(es, state.amp);
  const double total = p.sum();
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::int64_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return {i, es.energy[i]};
  }
  const std::int64_t last = p.size() - 1;
  return {last, es.energy[last]};
}

MatC partial_trace_to_support(const StateVector& state,
                              const std::vector<int>& support) {
  const EmbeddingPlan plan(state.shape, support);
  const std::int64_t ds = plan.sup_dim();
  MatC rho = MatC::Zero(ds, ds);
  for (std::int64_t r = 0; r < plan.rest_dim(); ++r) {
    const std::int64_t base = plan.base(r);
    for (std::int64_t s = 0; s < ds; ++s) {
      const cplx as = state.amp[base + plan.offset(s)];
      if (as == cplx(0.0)) continue;
      for (std::int64_t t = 0; t < ds; ++t)
        rho(s, t) += as * std::conj(state.amp[base + plan.offset(t)]);
    }
  }
  return rho;
}

Projector haar_in_range(const Projector& p, RngStream& rng) {
  Eigen::SelfAdjointEigenSolver<MatC> solver(p.mat);
  const std::int64_t d = p.mat.rows();
  std::vector<std::int64_t> range_cols;
  for (std::int64_t i = 0; i < d; ++i)
    if (solver.eigenvalues()[i] > 0.5) range_cols.push_back(i);
  if (static_cast<int>(range_cols.size()) != p.rank)
    throw ValidationError("haar_in_range: projector rank mismatch");
  VecC v = VecC::Zero(d);
  for (std::int64_t c : range_cols)
    v += rng.gaussian_complex() * solver.eigenvectors().col(c);
  v /= v.norm();
  Projector out;
  out.support = p.support;
  out.mat = v * v.adjoint();
  out.rank = 1;
  return out;
}

namespace {

MatC kron(const MatC& a, const MatC& b) {
  MatC out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::int64_t i = 0; i < a.rows(); ++i)
    for (std::int64_t j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

std::vector<MatC> site_basis(int d) {
  const cplx I(0.0, 1.0);
  std::vector<MatC> basis;
  if (d == 2) {
    MatC id = MatC::Identity(2, 2);
    MatC x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, -I, I, 0;
    z << 1, 0, 0, -1;
    basis = {id, x, y, z};
  } else if (d == 3) {
    MatC id = MatC::Identity(3, 3);
    basis.push_back(id);
    auto sym = [](int a, int b) {
      MatC m = MatC::Zero(3, 3);
      m(a, b) = 1;
      m(b, a) = 1;
      return m;
    };
    auto antisym = [I](int a, int b) {
      MatC m = MatC::Zero(3, 3);
      m(a, b) = -I;
      m(b, a) = I;
      return m;
    };
    basis.push_back(sym(0, 1));
    basis.push_back(antisym(0, 1));
    MatC l3 = MatC::Zero(3, 3);
    l3(0, 0) = 1;
    l3(1, 1) = -1;
    basis.push_back(l3);
    basis.push_back(sym(0, 2));
    basis.push_back(antisym(0, 2));
    basis.push_back(sym(1, 2));
    basis.push_back(antisym(1, 2));
    // diag(1,1,-2)/sqrt(3), rescaled to unit spectral norm.
    MatC l8 = MatC::Zero(3, 3);
    l8(0, 0) = 0.5;
    l8(1, 1) = 0.5;
    l8(2, 2) = -1.0;
    basis.push_back(l8);
  } else {
    throw ValidationError("operator_basis: site dimension must be 2 or 3");
  }
  return basis;
}

}  // namespace

std::vector<MatC> operator_basis(const std::vector<int>& dims) {
  std::vector<MatC> out{MatC::Identity(1, 1)};
  for (int d : dims) {
    const auto site = site_basis(d);
    std::vector<MatC> next;
    next.reserve(out.size() * site.size());
    for (const auto& a : out)
      for (const auto& b : site) next.push_back(kron(a, b));
    out = std::move(next);
  }
  return out;
}

}  // namespace qalt
