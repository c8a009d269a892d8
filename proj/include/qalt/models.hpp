#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qalt/qop.hpp"
#include "qalt/rng.hpp"
#include "qalt/types.hpp"

namespace qalt {

struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // i < j, lexicographically sorted
};

/// Uniform random d-regular graph via the pairing model with rejection of
/// self-loops and parallel edges (whole-matching retry).
Graph random_regular_graph(int n, int degree, RngStream& rng);
Graph path_graph(int n);

/// Sum of projector terms plus an optional multiple of the identity:
/// H = sum_i P_i + offset * I. All model Hamiltonians below use this form.
struct LocalHamiltonian {
  RegisterShape shape;
  std::vector<Projector> terms;
  double offset = 0.0;
  std::string label;

  std::vector<LocalOperator> term_ops() const;
  LocalApplier applier() const { return LocalApplier(shape, term_ops()); }
  HermitianOp<cplx> assemble() const;
  /// Real-symmetric assembly; requires every term entry to be (numerically)
  /// real, which all built-in models satisfy.
  HermitianOp<double> assemble_real() const;
  bool is_diagonal(double tol = 1e-14) const;
  /// Diagonal of the assembled matrix (valid for any H, exact for diagonal).
  VecR diagonal() const;
};

/// Max-Cut Hamiltonian: one rank-2 diagonal projector (1/2)(I + Z_i Z_j)
/// per edge; counts uncut edges.
LocalHamiltonian maxcut_hamiltonian(const Graph& g);

enum class QmcForm { projector, swap_half };

/// Quantum Max-Cut / Heisenberg model. Terms are the per-edge triplet
/// projectors (I + Swap)/2; `swap_half` subtracts |E|/2 * I so reported
/// energies match the per-edge Swap/2 normalization, without changing the
/// projector term structure.
LocalHamiltonian qmc_hamiltonian(const Graph& g,
                                 QmcForm form = QmcForm::projector);

/// 1D spin-1 AKLT chain: per-bond projectors onto total spin 2,
/// P = (1/3) I + (1/2) S.S + (1/6) (S.S)^2, each of rank 5. Open boundaries
/// by default; `periodic` adds the wrap-around bond. Raise `dim_cap` for
/// matrix-free work (variational runs) beyond the dense cap.
LocalHamiltonian aklt_hamiltonian(
    int n, bool periodic = false,
    std::int64_t dim_cap = RegisterShape::kDefaultDimCap);

/// The four exact zero-energy states of the open AKLT chain (orthonormal):
/// bond-dimension-2 matrix-product states over the edge-spin boundary pairs.
std::vector<StateVector> aklt_ground_states(
    int n, std::int64_t dim_cap = RegisterShape::kDefaultDimCap);

/// Classical (diagonal) Hamiltonian given by its energy per bit-string.
struct DiagonalLandscape {
  int n_bits = 0;
  VecR e;
  std::string label;

  std::int64_t dim() const { return e.size(); }
};

/// Oracle landscape: energy 1 everywhere except 0 at the marked string.
DiagonalLandscape grover_landscape(int n, std::int64_t marked);

/// Energy-well landscape: ground anchors at 0...0 and 1...1 (energy 0) plus
/// `n_anchors` random distinct decoy anchors at energy 1; every string gets
/// nearest-anchor energy plus multiplier * Hamming distance to that anchor,
/// minimized over anchors in order (earlier anchor wins ties).
DiagonalLandscape well_landscape(int n, int n_anchors, double multiplier,
                                 RngStream& rng);

/// Linear ramp E_i = i * e_max / 2^n (a barrier-free smooth profile).
DiagonalLandscape linear_landscape(int n, double e_max);

HermitianOp<double> landscape_to_operator(const DiagonalLandscape& l);

/// Trivial eigensystem of a diagonal landscape: energies sorted ascending,
/// the basis stored as a permutation (column c = basis vector perm[c]).
EigenSystem<double> landscape_eigensystem(const DiagonalLandscape& l);

// Canonical initial states.
StateVector uniform_product_state(const RegisterShape& shape);  // |+>^(x)n
StateVector basis_state(const RegisterShape& shape, std::int64_t index);
StateVector haar_state(const RegisterShape& shape, RngStream& rng);

}  // namespace qalt
