#include "qalt/models.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace qalt {

Graph random_regular_graph(int n, int degree, RngStream& rng) {
  if (n * degree % 2 != 0)
    throw ValidationError("random_regular_graph: n * degree must be even");
  if (degree >= n)
    throw ValidationError("random_regular_graph: degree must be < n");
  // Stub matching with a uniform draw over the currently allowed stub pairs
  // (no loops or parallel edges) and a restart on the rare dead end; plain
  // pairing rejection stalls already at degree 6.
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(n * degree));
    for (int v = 0; v < n; ++v)
      for (int k = 0; k < degree; ++k) stubs.push_back(v);
    std::set<std::pair<int, int>> edges;
    std::vector<std::pair<std::size_t, std::size_t>> allowed;
    bool dead_end = false;
    while (!stubs.empty()) {
      allowed.clear();
      for (std::size_t i = 0; i + 1 < stubs.size(); ++i)
        for (std::size_t j = i + 1; j < stubs.size(); ++j) {
          int a = stubs[i], b = stubs[j];
          if (a == b) continue;
          if (a > b) std::swap(a, b);
          if (!edges.count({a, b})) allowed.emplace_back(i, j);
        }
      if (allowed.empty()) {
        dead_end = true;
        break;
      }
      const auto [i, j] = allowed[rng.uniform_index(allowed.size())];
      int a = stubs[i], b = stubs[j];
      if (a > b) std::swap(a, b);
      edges.insert({a, b});
      // Remove j first: it is the larger index.
      stubs[j] = stubs.back();
      stubs.pop_back();
      stubs[i] = stubs.back();
      stubs.pop_back();
    }
    if (!dead_end) {
      Graph g;
      g.n = n;
      g.edges.assign(edges.begin(), edges.end());
      return g;
    }
  }
  throw NumericalError("random_regular_graph: stub matching did not finish");
}

Graph path_graph(int n) {
  Graph g;
  g.n = n;
  for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
  return g;
}

std::vector<LocalOperator> LocalHamiltonian::term_ops() const {
  std::vector<LocalOperator> ops;
  ops.reserve(terms.size());
  for (const auto& t : terms) ops.push_back({t.support, t.mat});
  return ops;
}

HermitianOp<cplx> LocalHamiltonian::assemble() const {
  HermitianOp<cplx> h{shape,
                      MatC::Zero(shape.total_dim, shape.total_dim)};
  for (const auto& t : terms) {
    const HermitianOp<cplx> e = embed<cplx>(t.mat, t.support, shape);
    h.mat += e.mat;
  }
  h.mat += offset * MatC::Identity(shape.total_dim, shape.total_dim);
  return h;
}

HermitianOp<double> LocalHamiltonian::assemble_real() const {
  HermitianOp<double> h{shape, MatR::Zero(shape.total_dim, shape.total_dim)};
  for (const auto& t : terms) {
    if (t.mat.imag().cwiseAbs().maxCoeff() > 1e-14 * (1.0 + detail::max_abs(t.mat)))
      throw ValidationError("assemble_real: term has complex entries");
    const HermitianOp<double> e = embed<double>(MatR(t.mat.real()), t.support, shape);
    h.mat += e.mat;
  }
  h.mat.diagonal().array() += offset;
  return h;
}

bool LocalHamiltonian::is_diagonal(double tol) const {
  for (const auto& t : terms)
    for (std::int64_t j = 0; j < t.mat.cols(); ++j)
      for (std::int64_t i = 0; i < t.mat.rows(); ++i)
        if (i != j && std::abs(t.mat(i, j)) > tol) return false;
  return true;
}

VecR LocalHamiltonian::diagonal() const {
  VecR d = VecR::Constant(shape.total_dim, offset);
  for (const auto& t : terms) {
    const EmbeddingPlan plan(shape, t.support);
    for (std::int64_t r = 0; r < plan.rest_dim(); ++r)
      for (std::int64_t s = 0; s < plan.sup_dim(); ++s)
        d[plan.flat(r, s)] += t.mat(s, s).real();
  }
  return d;
}

LocalHamiltonian maxcut_hamiltonian(const Graph& g) {
  LocalHamiltonian h;
  h.shape = RegisterShape::qubits(g.n);
  h.label = "maxcut";
  MatC p = MatC::Zero(4, 4);
  p(0, 0) = 1.0;  // |00>
  p(3, 3) = 1.0;  // |11>
  for (const auto& [i, j] : g.edges) h.terms.push_back({{i, j}, p, 2});
  return h;
}

LocalHamiltonian qmc_hamiltonian(const Graph& g, QmcForm form) {
  LocalHamiltonian h;
  h.shape = RegisterShape::qubits(g.n);
  h.label = "qmc";
  MatC p = MatC::Zero(4, 4);  // (I + Swap)/2: projector onto the triplet
  p(0, 0) = 1.0;
  p(3, 3) = 1.0;
  p(1, 1) = p(2, 2) = 0.5;
  p(1, 2) = p(2, 1) = 0.5;
  for (const auto& [i, j] : g.edges) h.terms.push_back({{i, j}, p, 3});
  if (form == QmcForm::swap_half)
    h.offset = -0.5 * static_cast<double>(g.edges.size());
  return h;
}

namespace {

MatC spin1_dot_product() {
  // S.S on two spin-1 sites, local basis ordered m = +1, 0, -1.
  MatC sz = MatC::Zero(3, 3);
  sz(0, 0) = 1.0;
  sz(2, 2) = -1.0;
  MatC sp = MatC::Zero(3, 3);
  sp(0, 1) = std::sqrt(2.0);
  sp(1, 2) = std::sqrt(2.0);
  const MatC sm = sp.adjoint();
  const MatC sx = 0.5 * (sp + sm);
  const MatC sy = cplx(0.0, -0.5) * (sp - sm);

  auto kron3 = [](const MatC& a, const MatC& b) {
    MatC out(9, 9);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out.block(i * 3, j * 3, 3, 3) = a(i, j) * b;
    return out;
  };
  return kron3(sx, sx) + kron3(sy, sy) + kron3(sz, sz);
}

}  // namespace

LocalHamiltonian aklt_hamiltonian(int n, bool periodic, std::int64_t dim_cap) {
  if (n < 2) throw ValidationError("aklt_hamiltonian: need at least 2 sites");
  LocalHamiltonian h;
  h.shape = RegisterShape::qutrits(n, dim_cap);
  h.label = periodic ? "aklt_periodic" : "aklt";
  const MatC ss = spin1_dot_product();
  const MatC p = MatC::Identity(9, 9) / 3.0 + 0.5 * ss + (ss * ss) / 6.0;
  for (int i = 0; i + 1 < n; ++i) h.terms.push_back({{i, i + 1}, p, 5});
  // Wrap-around bond on support {0, n-1}: P commutes with the two-site swap
  // (the spin-2 subspace is symmetric), so the support reordering is free.
  if (periodic && n > 2) h.terms.push_back({{0, n - 1}, p, 5});
  return h;
}

std::vector<StateVector> aklt_ground_states(int n, std::int64_t dim_cap) {
  // Bond-dimension-2 matrix-product zero modes of the open chain; the four
  // boundary-pair contractions span the ground space for n >= 2.
  const RegisterShape shape = RegisterShape::qutrits(n, dim_cap);
  using M2 = Eigen::Matrix2cd;
  M2 a_plus = M2::Zero(), a_zero = M2::Zero(), a_minus = M2::Zero();
  a_plus(0, 1) = std::sqrt(2.0 / 3.0);
  a_zero(0, 0) = -std::sqrt(1.0 / 3.0);
  a_zero(1, 1) = std::sqrt(1.0 / 3.0);
  a_minus(1, 0) = -std::sqrt(2.0 / 3.0);
  const M2 site[3] = {a_plus, a_zero, a_minus};

  std::vector<VecC> raw;
  for (int bl = 0; bl < 2; ++bl)
    for (int br = 0; br < 2; ++br) {
      VecC amp(shape.total_dim);
      for (std::int64_t x = 0; x < shape.total_dim; ++x) {
        M2 prod = M2::Identity();
        std::int64_t rem = x;
        for (int s = n - 1; s >= 0; --s) {
          const int digit = static_cast<int>(rem % 3);
          prod = site[digit] * prod;
          rem /= 3;
        }
        amp[x] = prod(bl, br);
      }
      raw.push_back(std::move(amp));
    }

  // Gram-Schmidt; the raw states are independent but not orthogonal.
  std::vector<StateVector> out;
  for (auto& v : raw) {
    for (const auto& u : out) v -= u.amp.dot(v) * u.amp;
    const double nrm = v.norm();
    if (nrm < 1e-12)
      throw NumericalError("aklt_ground_states: dependent boundary states");
    out.push_back({shape, v / nrm});
  }
  return out;
}

DiagonalLandscape grover_landscape(int n, std::int64_t marked) {
  const std::int64_t d = std::int64_t{1} << n;
  if (marked < 0 || marked >= d)
    throw ValidationError("grover_landscape: marked index out of range");
  DiagonalLandscape l;
  l.n_bits = n;
  l.e = VecR::Ones(d);
  l.e[marked] = 0.0;
  l.label = "grover";
  return l;
}

DiagonalLandscape well_landscape(int n, int n_anchors, double multiplier,
                                 RngStream& rng) {
  const std::int64_t d = std::int64_t{1} << n;
  struct Anchor {
    std::int64_t at;
    double e;
  };
  std::vector<Anchor> anchors{{0, 0.0}, {d - 1, 0.0}};
  std::set<std::int64_t> used{0, d - 1};
  while (static_cast<int>(anchors.size()) < n_anchors + 2) {
    const auto cand = static_cast<std::int64_t>(rng.uniform_index(
        static_cast<std::size_t>(d)));
    if (used.insert(cand).second) anchors.push_back({cand, 1.0});
  }
  DiagonalLandscape l;
  l.n_bits = n;
  l.e.resize(d);
  l.label = "well";
  for (std::int64_t x = 0; x < d; ++x) {
    double best = 0.0;
    bool first = true;
    for (const auto& a : anchors) {
      const double cand =
          a.e + multiplier *
                    static_cast<double>(__builtin_popcountll(
                        static_cast<unsigned long long>(x ^ a.at)));
      if (first || cand < best) {
        best = cand;
        first = false;
      }
    }
    l.e[x] = best;
  }
  return l;
}

DiagonalLandscape linear_landscape(int n, double e_max) {
  const std::int64_t d = std::int64_t{1} << n;
  DiagonalLandscape l;
  l.n_bits = n;
  l.e.resize(d);
  l.label = "linear";
  for (std::int64_t x = 0; x < d; ++x)
    l.e[x] = static_cast<double>(x) * e_max / static_cast<double>(d);
  return l;
}

HermitianOp<double> landscape_to_operator(const DiagonalLandscape& l) {
  const RegisterShape shape = RegisterShape::qubits(l.n_bits);
  HermitianOp<double> h{shape, MatR::Zero(l.dim(), l.dim())};
  h.mat.diagonal() = l.e;
  return h;
}

EigenSystem<double> landscape_eigensystem(const DiagonalLandscape& l) {
  const std::int64_t d = l.dim();
  std::vector<std::int64_t> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::int64_t a,
                                                   std::int64_t b) {
    return l.e[a] < l.e[b];
  });
  EigenSystem<double> es;
  es.energy.resize(d);
  es.perm.resize(static_cast<std::size_t>(d));
  for (std::int64_t c = 0; c < d; ++c) {
    const std::int64_t idx = order[static_cast<std::size_t>(c)];
    es.energy[c] = l.e[idx];
    es.perm[static_cast<std::size_t>(c)] = idx;
  }
  return es;
}

StateVector uniform_product_state(const RegisterShape& shape) {
  const double a = 1.0 / std::sqrt(static_cast<double>(shape.total_dim));
  return {shape, VecC::Constant(shape.total_dim, cplx(a, 0.0))};
}

StateVector basis_state(const RegisterShape& shape, std::int64_t index) {
  if (index < 0 || index >= shape.total_dim)
    throw ValidationError("basis_state: index out of range");
  VecC amp = VecC::Zero(shape.total_dim);
  amp[index] = 1.0;
  return {shape, amp};
}

StateVector haar_state(const RegisterShape& shape, RngStream& rng) {
  VecC amp(shape.total_dim);
  for (std::int64_t i = 0; i < shape.total_dim; ++i)
    amp[i] = rng.gaussian_complex();
  amp /= amp.norm();
  return {shape, amp};
}

}  // namespace qalt
