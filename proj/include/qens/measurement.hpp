#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "qens/state.hpp"

namespace qens {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

inline constexpr double kProjectorTol = 1e-10;
inline constexpr double kProbabilityFloor = 1e-14;
inline constexpr double kProbabilityClamp = 1e-12;
inline constexpr double kImagTol = 1e-10;

// Hermitian observable stored with its spectral decomposition. Projectors are
// kept sparse; the eigenprojector of a collective spin component on m qubits
// is diagonal, and a dense copy per eigenvalue would not fit in memory.
class Observable {
 public:
  struct SpectralLine {
    double eigenvalue = 0.0;
    SparseMatrix projector;
    int rank = 0;
  };

  // Decomposition via an eigensolver; eigenvalues closer than degeneracy_tol
  // are merged into one spectral line.
  static Observable spectral_decompose(const Matrix& m, double degeneracy_tol = 1e-8);

  // Decomposition of an operator that is diagonal in the computational basis.
  static Observable diagonal(const Eigen::VectorXd& entries,
                             double degeneracy_tol = 1e-8);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  const std::vector<SpectralLine>& spectrum() const { return lines_; }

 private:
  // recon_tol widens the reconstruction check by the eigenvalue shift that
  // merging near-degenerate lines to their cluster mean introduces.
  Observable(Matrix m, std::vector<SpectralLine> lines, double recon_tol);

  Matrix m_;
  std::vector<SpectralLine> lines_;
};

// Probabilities attached to the eigenvalues of an observable, ordered by
// ascending eigenvalue. Probabilities sum to one within kProjectorTol.
struct OutcomeDistribution {
  struct Entry {
    double eigenvalue = 0.0;
    double probability = 0.0;
  };
  std::vector<Entry> entries;

  double mean() const;
  double moment(int k) const;
};

// Outcome distribution p_x = Tr[rho P_x].
OutcomeDistribution born(const DensityOperator& rho, const Observable& obs);

// k-th moment sum_x x^k p_x of the outcome distribution (k >= 1).
double expectation(const DensityOperator& rho, const Observable& obs, int k = 1);

// Projective update of a pure state. When the outcome probability is below
// kProbabilityFloor the state is absent and only the probability is reported.
struct Projection {
  double probability = 0.0;
  std::optional<PureState> state;
};
Projection project(const PureState& psi, const Matrix& proj);

// Outcome probability and the conditional state of subsystem B after
// measuring projector proj_a on subsystem A of a bipartite state.
// Zero-probability outcomes (below kProbabilityFloor) are an error.
std::pair<double, DensityOperator> conditional_state(const DensityOperator& rho_ab,
                                                     const Matrix& proj_a);

// Collective spin-z component on m qubits: sum over qubits of sigma_z acting
// on that qubit. Diagonal entries are (#zeros - #ones) of the basis string.
// Guarded to m <= 12.
Observable collective_sigma_z(int m);

}  // namespace qens
