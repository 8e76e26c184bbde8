#include "qens/cloning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

#include "qens/measurement.hpp"

namespace qens {

namespace {

constexpr double kUnitaryTol = 1e-10;
constexpr double kEtaSpreadTol = 1e-8;

int triple_index(int a, int b, int c) { return a * 4 + b * 2 + c; }

// The machine is specified by its action on the two inputs |0, blank, ancilla>
// and |1, blank, ancilla>. The remaining six columns are free up to unitarity
// and are completed by Gram-Schmidt over the canonical basis in index order,
// which makes the construction deterministic. Clone statistics depend only on
// the two specified columns.
Matrix build_bh_unitary(int blank, int ancilla) {
  const double s23 = std::sqrt(2.0 / 3.0);
  const double s16 = std::sqrt(1.0 / 6.0);

  Vector col0 = Vector::Zero(8);
  col0(triple_index(0, 0, 1)) = s23;
  col0(triple_index(0, 1, 0)) = -s16;
  col0(triple_index(1, 0, 0)) = -s16;

  Vector col1 = Vector::Zero(8);
  col1(triple_index(1, 1, 0)) = -s23;
  col1(triple_index(0, 1, 1)) = s16;
  col1(triple_index(1, 0, 1)) = s16;

  const int input0 = triple_index(0, blank, ancilla);
  const int input1 = triple_index(1, blank, ancilla);

  Matrix u = Matrix::Zero(8, 8);
  u.col(input0) = col0;
  u.col(input1) = col1;

  std::vector<Vector> basis = {col0, col1};
  std::vector<int> free_columns;
  for (int i = 0; i < 8; ++i) {
    if (i != input0 && i != input1) free_columns.push_back(i);
  }

  std::size_t next_free = 0;
  for (int k = 0; k < 8 && next_free < free_columns.size(); ++k) {
    Vector w = Vector::Zero(8);
    w(k) = 1.0;
    for (const Vector& v : basis) {
      w -= v * (v.dot(w));
    }
    const double norm = w.norm();
    if (norm < 1e-6) continue;
    w /= norm;
    basis.push_back(w);
    u.col(free_columns[next_free++]) = w;
  }
  if (next_free != free_columns.size()) {
    throw numerical_error("failed to complete the cloning unitary");
  }

  const double unitarity = (u.adjoint() * u - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff();
  if (unitarity > kUnitaryTol) {
    throw numerical_error("cloning matrix is not unitary (deviation " +
                          std::to_string(unitarity) + ")");
  }
  return u;
}

}  // namespace

CloningChannel::CloningChannel(Kind kind, Matrix unitary, std::vector<PureState> registers)
    : kind_(kind), unitary_(std::move(unitary)), registers_(std::move(registers)) {}

CloningChannel CloningChannel::buzek_hillery(int blank, int ancilla) {
  if ((blank != 0 && blank != 1) || (ancilla != 0 && ancilla != 1)) {
    throw std::invalid_argument("blank and ancilla must be basis states 0 or 1");
  }
  std::vector<PureState> registers = {basis_state(2, blank), basis_state(2, ancilla)};
  return CloningChannel(Kind::buzek_hillery, build_bh_unitary(blank, ancilla),
                        std::move(registers));
}

CloningChannel CloningChannel::perfect() {
  return CloningChannel(Kind::perfect_hypothetical, Matrix(), {});
}

const Matrix& CloningChannel::unitary() const {
  if (kind_ != Kind::buzek_hillery) {
    throw std::invalid_argument("the perfect cloner has no unitary representation");
  }
  return unitary_;
}

const PureState& CloningChannel::blank() const {
  if (kind_ != Kind::buzek_hillery) {
    throw std::invalid_argument("the perfect cloner has no blank register");
  }
  return registers_[0];
}

const PureState& CloningChannel::ancilla() const {
  if (kind_ != Kind::buzek_hillery) {
    throw std::invalid_argument("the perfect cloner has no ancilla register");
  }
  return registers_[1];
}

PureState bh_output_state(const CloningChannel& c, const PureState& psi) {
  if (psi.dim() != 2) throw std::invalid_argument("cloning input must be a qubit");
  const PureState input = tensor_all({psi, c.blank(), c.ancilla()});
  return PureState(c.unitary() * input.amplitudes());
}

CloneResult clone(const CloningChannel& c, const PureState& psi) {
  if (psi.dim() != 2) throw std::invalid_argument("cloning input must be a qubit");
  if (c.is_perfect()) {
    const DensityOperator copy = DensityOperator::pure(psi);
    return {tensor(copy, copy), copy, copy};
  }
  const PureState output = bh_output_state(c, psi);
  const DensityOperator full(projector(output), qubits(3));
  DensityOperator joint = partial_trace(full, {0, 1});
  DensityOperator a = partial_trace(joint, {0});
  DensityOperator b = partial_trace(joint, {1});
  return {std::move(joint), std::move(a), std::move(b)};
}

double single_clone_fidelity(const PureState& psi, const DensityOperator& clone) {
  if (psi.dim() != 2 || clone.dim() != 2) {
    throw std::invalid_argument("single-clone fidelity is defined for qubits");
  }
  const cplx f = psi.amplitudes().dot(clone.matrix() * psi.amplitudes());
  if (std::abs(f.imag()) > kHermitianTol) {
    throw numerical_error("fidelity has imaginary part " + std::to_string(f.imag()));
  }
  const double value = f.real();
  if (value < -kHermitianTol || value > 1.0 + kHermitianTol) {
    throw numerical_error("fidelity outside [0, 1]: " + std::to_string(value));
  }
  return std::clamp(value, 0.0, 1.0);
}

double average_fidelity(const CloneMap& map, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("sample count must be >= 1");
  double sum = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(i));
    const PureState psi = haar_random_qubit(rng);
    const auto [a, b] = map(psi);
    sum += 0.5 * (single_clone_fidelity(psi, a) + single_clone_fidelity(psi, b));
  }
  return sum / n_samples;
}

double average_fidelity(const CloningChannel& c, int n_samples, std::uint64_t seed) {
  return average_fidelity(
      [&c](const PureState& psi) {
        CloneResult r = clone(c, psi);
        return std::make_pair(std::move(r.clone_a), std::move(r.clone_b));
      },
      n_samples, seed);
}

double shrinking_factor(const SingleCloneMap& map, const std::vector<PureState>& probes) {
  if (probes.size() < 3) {
    throw std::invalid_argument("shrinking factor needs at least three probes");
  }
  Eigen::MatrixXd directions(3, static_cast<Eigen::Index>(probes.size()));
  for (std::size_t i = 0; i < probes.size(); ++i) {
    directions.col(static_cast<Eigen::Index>(i)) =
        bloch_of(DensityOperator::pure(probes[i])).r();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(directions);
  if (svd.singularValues().size() < 3 || svd.singularValues()(2) < 1e-6) {
    throw std::invalid_argument("probes do not span the Bloch sphere");
  }

  double eta_min = 0.0;
  double eta_max = 0.0;
  bool first = true;
  for (const PureState& probe : probes) {
    const Eigen::Vector3d r_in = bloch_of(DensityOperator::pure(probe)).r();
    const Eigen::Vector3d r_out = bloch_of(map(probe)).r();
    const double eta = r_out.dot(r_in) / r_in.squaredNorm();
    if ((r_out - eta * r_in).norm() > kEtaSpreadTol) {
      throw std::invalid_argument(
          "channel is not universal: output Bloch vector is not parallel to input");
    }
    eta_min = first ? eta : std::min(eta_min, eta);
    eta_max = first ? eta : std::max(eta_max, eta);
    first = false;
  }
  if (eta_max - eta_min > kEtaSpreadTol) {
    throw std::invalid_argument("channel is not universal: shrinking factor varies " +
                                std::to_string(eta_max - eta_min) + " across probes");
  }
  return 0.5 * (eta_min + eta_max);
}

double shrinking_factor(const CloningChannel& c, const std::vector<PureState>& probes) {
  return shrinking_factor(
      [&c](const PureState& psi) { return clone(c, psi).clone_a; }, probes);
}

std::vector<PureState> default_probe_states() {
  const double s = 1.0 / std::sqrt(2.0);
  Vector plus_y(2), minus_y(2);
  plus_y << s, cplx(0.0, s);
  minus_y << s, cplx(0.0, -s);
  return {ket_plus(), ket_minus(), PureState(plus_y), PureState(minus_y), ket0(), ket1()};
}

DensityOperator flash_experiment(const CloningChannel& c, double phi) {
  if (phi < 0.0 || phi >= 2.0 * std::numbers::pi) {
    throw std::invalid_argument("phi must lie in [0, 2*pi)");
  }

  const PureState bell = PureState([] {
    Vector v = Vector::Zero(4);
    v(0) = 1.0 / std::sqrt(2.0);
    v(3) = 1.0 / std::sqrt(2.0);
    return v;
  }());
  const DensityOperator shared = DensityOperator::pure(bell, qubits(2));

  const Observable setting = Observable::spectral_decompose(sigma_phi(phi));

  Matrix mixture = Matrix::Zero(4, 4);
  for (const auto& line : setting.spectrum()) {
    const auto [prob, bob] = conditional_state(shared, Matrix(line.projector));

    Eigen::SelfAdjointEigenSolver<Matrix> solver(bob.matrix());
    const Eigen::Index top = solver.eigenvalues().size() - 1;
    if (solver.eigenvalues()(top) < 1.0 - kProjectorTol) {
      throw numerical_error("conditional state is not pure; largest eigenvalue " +
                            std::to_string(solver.eigenvalues()(top)));
    }
    const PureState bob_pure = PureState(solver.eigenvectors().col(top));

    mixture.noalias() += prob * clone(c, bob_pure).joint.matrix();
  }
  return DensityOperator(std::move(mixture), qubits(2));
}

}  // namespace qens
