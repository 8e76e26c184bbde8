#include "qens/state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <unsupported/Eigen/KroneckerProduct>

namespace qens {

namespace {

double hermitian_deviation(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void require_hermitian_trace_one(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("density operator matrix must be square");
  }
  const double herm = hermitian_deviation(m);
  if (herm > kHermitianTol) {
    throw numerical_error("density operator is not Hermitian (deviation " +
                          std::to_string(herm) + ")");
  }
  const double tr_err = std::abs(m.trace() - cplx(1.0, 0.0));
  if (tr_err > kTraceTol) {
    throw numerical_error("density operator trace differs from one by " +
                          std::to_string(tr_err));
  }
}

}  // namespace

SubsystemLayout::SubsystemLayout(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) {
    throw std::invalid_argument("subsystem layout needs at least one factor");
  }
  for (int d : dims_) {
    if (d < 2) throw std::invalid_argument("subsystem dimensions must be >= 2");
  }
}

int SubsystemLayout::total_dim() const {
  long long total = 1;
  for (int d : dims_) {
    total *= d;
    if (total > (1 << 30)) throw std::invalid_argument("layout dimension overflow");
  }
  return static_cast<int>(total);
}

SubsystemLayout SubsystemLayout::concatenated(const SubsystemLayout& other) const {
  std::vector<int> dims = dims_;
  dims.insert(dims.end(), other.dims_.begin(), other.dims_.end());
  return SubsystemLayout(std::move(dims));
}

SubsystemLayout qubits(int m) {
  if (m < 1) throw std::invalid_argument("qubit count must be >= 1");
  return SubsystemLayout(std::vector<int>(static_cast<std::size_t>(m), 2));
}

PureState::PureState(Vector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() < 1) throw std::invalid_argument("state vector is empty");
  const double norm_err = std::abs(amps_.norm() - 1.0);
  if (norm_err > kNormTol) {
    throw numerical_error("state vector norm differs from one by " +
                          std::to_string(norm_err));
  }
}

cplx PureState::overlap(const PureState& other) const {
  if (other.dim() != dim()) {
    throw std::invalid_argument("overlap requires equal dimensions");
  }
  return amps_.dot(other.amps_);
}

BlochVector::BlochVector(double x, double y, double z)
    : BlochVector(Eigen::Vector3d(x, y, z)) {}

BlochVector::BlochVector(const Eigen::Vector3d& r) : r_(r) {
  if (r_.norm() > 1.0 + kBlochTol) {
    throw std::invalid_argument("Bloch vector has length > 1");
  }
}

DensityOperator::DensityOperator(Matrix matrix, SubsystemLayout layout)
    : m_(std::move(matrix)), layout_(std::move(layout)) {
  require_hermitian_trace_one(m_);
  if (layout_.total_dim() != m_.rows()) {
    throw std::invalid_argument("layout dimension does not match matrix size");
  }
}

DensityOperator::DensityOperator(Matrix matrix)
    : m_(std::move(matrix)), layout_({static_cast<int>(m_.rows())}) {
  require_hermitian_trace_one(m_);
}

DensityOperator DensityOperator::pure(const PureState& psi) {
  return DensityOperator(projector(psi));
}

DensityOperator DensityOperator::pure(const PureState& psi, SubsystemLayout layout) {
  return DensityOperator(projector(psi), std::move(layout));
}

DensityOperator DensityOperator::maximally_mixed(const SubsystemLayout& layout) {
  const int d = layout.total_dim();
  return DensityOperator(Matrix::Identity(d, d) / static_cast<double>(d), layout);
}

PureState basis_state(int dim, int index) {
  if (dim < 1 || index < 0 || index >= dim) {
    throw std::invalid_argument("basis state index out of range");
  }
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return PureState(std::move(v));
}

PureState ket(const std::string& bits) {
  if (bits.empty()) throw std::invalid_argument("empty bit string");
  int index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("bit string must be 0s and 1s");
    index = index * 2 + (c - '0');
  }
  return basis_state(1 << bits.size(), index);
}

PureState ket0() { return basis_state(2, 0); }
PureState ket1() { return basis_state(2, 1); }

PureState ket_plus() {
  Vector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return PureState(std::move(v));
}

PureState ket_minus() {
  Vector v(2);
  v << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  return PureState(std::move(v));
}

Matrix sigma_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix sigma_y() {
  Matrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

Matrix sigma_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix sigma_phi(double phi) {
  return std::cos(phi) * sigma_z() + std::sin(phi) * sigma_x();
}

Matrix projector(const PureState& psi) {
  return psi.amplitudes() * psi.amplitudes().adjoint();
}

PureState tensor(const PureState& a, const PureState& b) {
  Vector v = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes());
  return PureState(std::move(v));
}

PureState tensor_all(const std::vector<PureState>& factors) {
  if (factors.empty()) throw std::invalid_argument("tensor_all needs at least one factor");
  Vector v = factors.front().amplitudes();
  for (std::size_t i = 1; i < factors.size(); ++i) {
    v = Eigen::kroneckerProduct(v, factors[i].amplitudes()).eval();
  }
  return PureState(std::move(v));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  Matrix m = Eigen::kroneckerProduct(a.matrix(), b.matrix());
  return DensityOperator(std::move(m), a.layout().concatenated(b.layout()));
}

DensityOperator from_ensemble(const std::vector<std::pair<double, PureState>>& members,
                              SubsystemLayout layout) {
  if (members.empty()) throw std::invalid_argument("ensemble has no members");
  const int d = members.front().second.dim();
  double total = 0.0;
  for (const auto& [p, psi] : members) {
    if (psi.dim() != d) throw std::invalid_argument("ensemble states differ in dimension");
    if (p < 0.0) throw std::invalid_argument("ensemble probability is negative");
    total += p;
  }
  if (std::abs(total - 1.0) > kTraceTol) {
    throw std::invalid_argument("ensemble probabilities do not sum to one");
  }
  Matrix m = Matrix::Zero(d, d);
  for (const auto& [p, psi] : members) {
    m.noalias() += p * (psi.amplitudes() * psi.amplitudes().adjoint());
  }
  return DensityOperator(std::move(m), std::move(layout));
}

DensityOperator from_ensemble(const std::vector<std::pair<double, PureState>>& members) {
  if (members.empty()) throw std::invalid_argument("ensemble has no members");
  const int d = members.front().second.dim();
  return from_ensemble(members, SubsystemLayout({d}));
}

DensityDiagnostic is_density_operator(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return {false, "matrix is not square"};
  const double herm = hermitian_deviation(m);
  if (herm > tol) {
    return {false, "not Hermitian (deviation " + std::to_string(herm) + ")"};
  }
  const double tr_err = std::abs(m.trace() - cplx(1.0, 0.0));
  if (tr_err > tol) {
    return {false, "trace differs from one by " + std::to_string(tr_err)};
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  const double lambda_min = solver.eigenvalues().minCoeff();
  if (lambda_min < -tol) {
    return {false, "negative eigenvalue " + std::to_string(lambda_min)};
  }
  return {true, ""};
}

DensityOperator partial_trace(const DensityOperator& rho, std::vector<int> keep) {
  const std::vector<int>& dims = rho.layout().dims();
  const int n = static_cast<int>(dims.size());

  std::sort(keep.begin(), keep.end());
  if (keep.empty()) throw std::invalid_argument("partial trace must keep a subsystem");
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
    throw std::invalid_argument("duplicate subsystem index in partial trace");
  }
  if (keep.front() < 0 || keep.back() >= n) {
    throw std::invalid_argument("subsystem index out of range in partial trace");
  }

  std::vector<bool> kept(static_cast<std::size_t>(n), false);
  for (int k : keep) kept[static_cast<std::size_t>(k)] = true;
  std::vector<int> traced;
  for (int i = 0; i < n; ++i) {
    if (!kept[static_cast<std::size_t>(i)]) traced.push_back(i);
  }

  // Row-major strides: subsystem i advances the composite index by
  // prod_{j > i} dims[j].
  std::vector<long long> stride(static_cast<std::size_t>(n), 1);
  for (int i = n - 2; i >= 0; --i) {
    stride[static_cast<std::size_t>(i)] =
        stride[static_cast<std::size_t>(i + 1)] * dims[static_cast<std::size_t>(i + 1)];
  }

  const auto offsets_for = [&](const std::vector<int>& subs) {
    long long count = 1;
    for (int s : subs) count *= dims[static_cast<std::size_t>(s)];
    std::vector<long long> offsets(static_cast<std::size_t>(count), 0);
    for (long long idx = 0; idx < count; ++idx) {
      long long rem = idx;
      long long off = 0;
      for (auto it = subs.rbegin(); it != subs.rend(); ++it) {
        const int d = dims[static_cast<std::size_t>(*it)];
        off += (rem % d) * stride[static_cast<std::size_t>(*it)];
        rem /= d;
      }
      offsets[static_cast<std::size_t>(idx)] = off;
    }
    return offsets;
  };

  const std::vector<long long> kept_off = offsets_for(keep);
  const std::vector<long long> traced_off = offsets_for(traced);
  const int d_keep = static_cast<int>(kept_off.size());

  Matrix out = Matrix::Zero(d_keep, d_keep);
  const Matrix& m = rho.matrix();
  for (int r = 0; r < d_keep; ++r) {
    for (int c = 0; c < d_keep; ++c) {
      cplx sum = 0.0;
      for (long long t : traced_off) {
        sum += m(static_cast<Eigen::Index>(kept_off[static_cast<std::size_t>(r)] + t),
                 static_cast<Eigen::Index>(kept_off[static_cast<std::size_t>(c)] + t));
      }
      out(r, c) = sum;
    }
  }

  std::vector<int> out_dims;
  for (int k : keep) out_dims.push_back(dims[static_cast<std::size_t>(k)]);
  return DensityOperator(std::move(out), SubsystemLayout(std::move(out_dims)));
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw std::invalid_argument("trace distance requires equal dimensions");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.matrix() - sigma.matrix(),
                                               Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

BlochVector bloch_of(const DensityOperator& rho) {
  if (rho.dim() != 2) throw std::invalid_argument("Bloch vector requires a qubit operator");
  const Matrix& m = rho.matrix();
  const double x = (m * sigma_x()).trace().real();
  const double y = (m * sigma_y()).trace().real();
  const double z = (m * sigma_z()).trace().real();
  return BlochVector(x, y, z);
}

DensityOperator bloch_to(const BlochVector& r) {
  Matrix m(2, 2);
  m << cplx(0.5 * (1.0 + r.z()), 0.0), cplx(0.5 * r.x(), -0.5 * r.y()),
      cplx(0.5 * r.x(), 0.5 * r.y()), cplx(0.5 * (1.0 - r.z()), 0.0);
  return DensityOperator(std::move(m), qubits(1));
}

PureState orthogonal_complement(const PureState& psi) {
  if (psi.dim() != 2) {
    throw std::invalid_argument("orthogonal complement is defined for qubits");
  }
  Vector v(2);
  v << -std::conj(psi.amplitude(1)), std::conj(psi.amplitude(0));
  return PureState(std::move(v));
}

PureState haar_random_qubit(Rng& rng) { return PureState(haar_unit_vector(rng, 2)); }

}  // namespace qens
