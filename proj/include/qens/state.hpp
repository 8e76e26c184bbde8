#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qens/rng.hpp"

namespace qens {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Thrown when a quantity drifts past its numerical tolerance (a state loses
// normalization, an operator loses Hermiticity, a probability turns negative).
// Structural misuse (wrong dimensions, bad names, out-of-range parameters)
// throws std::invalid_argument instead.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kNormTol = 1e-12;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kBlochTol = 1e-12;

// Ordered list of local dimensions of a tensor-product space. Index 0 is the
// leftmost (slowest-varying) factor of the composite index.
class SubsystemLayout {
 public:
  explicit SubsystemLayout(std::vector<int> dims);

  const std::vector<int>& dims() const { return dims_; }
  int count() const { return static_cast<int>(dims_.size()); }
  int dim(int i) const { return dims_.at(i); }
  int total_dim() const;

  SubsystemLayout concatenated(const SubsystemLayout& other) const;

  bool operator==(const SubsystemLayout& other) const = default;

 private:
  std::vector<int> dims_;
};

// Layout of m qubits.
SubsystemLayout qubits(int m);

// Normalized pure state. Immutable; the norm is validated on construction.
class PureState {
 public:
  explicit PureState(Vector amplitudes);

  int dim() const { return static_cast<int>(amps_.size()); }
  const Vector& amplitudes() const { return amps_; }
  cplx amplitude(int i) const { return amps_(i); }

  // <this|other>
  cplx overlap(const PureState& other) const;

 private:
  Vector amps_;
};

// Bloch vector r with |r| <= 1 (validated within kBlochTol).
class BlochVector {
 public:
  BlochVector(double x, double y, double z);
  explicit BlochVector(const Eigen::Vector3d& r);

  const Eigen::Vector3d& r() const { return r_; }
  double x() const { return r_(0); }
  double y() const { return r_(1); }
  double z() const { return r_(2); }
  double norm() const { return r_.norm(); }

 private:
  Eigen::Vector3d r_;
};

// Density operator together with the subsystem layout of its Hilbert space.
// Construction validates Hermiticity, unit trace, and that the layout matches
// the matrix dimension. Positivity is an O(d^3) eigenvalue problem and is
// checked separately by is_density_operator.
class DensityOperator {
 public:
  DensityOperator(Matrix matrix, SubsystemLayout layout);
  explicit DensityOperator(Matrix matrix);

  static DensityOperator pure(const PureState& psi);
  static DensityOperator pure(const PureState& psi, SubsystemLayout layout);
  static DensityOperator maximally_mixed(const SubsystemLayout& layout);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  const SubsystemLayout& layout() const { return layout_; }

 private:
  Matrix m_;
  SubsystemLayout layout_;
};

// Computational basis states.
PureState basis_state(int dim, int index);
// Multi-qubit basis state from a bit string, e.g. ket("01") = |0> x |1>.
PureState ket(const std::string& bits);
PureState ket0();
PureState ket1();
// sigma_x eigenstates (|0> +- |1>) / sqrt(2).
PureState ket_plus();
PureState ket_minus();

// Pauli matrices. The convention sigma_z |0> = +|0> is fixed throughout.
Matrix sigma_x();
Matrix sigma_y();
Matrix sigma_z();
// cos(phi) sigma_z + sin(phi) sigma_x; phi = 0 recovers sigma_z.
Matrix sigma_phi(double phi);

// |psi><psi| as a plain matrix.
Matrix projector(const PureState& psi);

// Kronecker products; index convention is row-major, leftmost factor slowest.
PureState tensor(const PureState& a, const PureState& b);
PureState tensor_all(const std::vector<PureState>& factors);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

// Statistical mixture sum_k p_k |psi_k><psi_k|. Probabilities must be
// non-negative and sum to one within kTraceTol; all states share one dimension.
DensityOperator from_ensemble(const std::vector<std::pair<double, PureState>>& members);
DensityOperator from_ensemble(const std::vector<std::pair<double, PureState>>& members,
                              SubsystemLayout layout);

// Full density-operator check (Hermitian, unit trace, positive semidefinite,
// each within tol). On failure, `reason` names the first violated condition.
struct DensityDiagnostic {
  bool ok = false;
  std::string reason;
};
DensityDiagnostic is_density_operator(const Matrix& m, double tol = kPsdTol);

// Trace out every subsystem not listed in `keep`. Kept indices must be unique
// and in range; the output layout is the kept sublist in ascending order.
DensityOperator partial_trace(const DensityOperator& rho, std::vector<int> keep);

// (1/2) sum |eigenvalues(rho - sigma)|. Dimensions must agree.
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

// Bloch representation rho = (I + r . sigma) / 2 of a qubit operator.
BlochVector bloch_of(const DensityOperator& rho);
DensityOperator bloch_to(const BlochVector& r);

// State orthogonal to a qubit state, with the fixed phase convention
// (a, b) -> (-conj(b), conj(a)).
PureState orthogonal_complement(const PureState& psi);

// Haar-random qubit state.
PureState haar_random_qubit(Rng& rng);

}  // namespace qens
