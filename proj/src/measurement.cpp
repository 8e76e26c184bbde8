#include "qens/measurement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace qens {

namespace {

double sparse_max_abs(const SparseMatrix& m) {
  double result = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      result = std::max(result, std::abs(it.value()));
    }
  }
  return result;
}

// Tr[rho P] for sparse P, iterating the nonzeros of P only.
cplx trace_product(const Matrix& rho, const SparseMatrix& p) {
  cplx sum = 0.0;
  for (int k = 0; k < p.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(p, k); it; ++it) {
      sum += rho(it.col(), it.row()) * it.value();
    }
  }
  return sum;
}

// Clusters sorted (value, index) pairs: a new cluster starts when the gap to
// the previous value exceeds tol.
std::vector<std::vector<std::pair<double, int>>> cluster_sorted(
    std::vector<std::pair<double, int>> items, double tol) {
  std::sort(items.begin(), items.end());
  std::vector<std::vector<std::pair<double, int>>> clusters;
  for (const auto& item : items) {
    if (clusters.empty() || item.first - clusters.back().back().first > tol) {
      clusters.emplace_back();
    }
    clusters.back().push_back(item);
  }
  return clusters;
}

}  // namespace

Observable::Observable(Matrix m, std::vector<SpectralLine> lines, double recon_tol)
    : m_(std::move(m)), lines_(std::move(lines)) {
  const int d = dim();
  const SparseMatrix identity = [d] {
    SparseMatrix id(d, d);
    id.setIdentity();
    return id;
  }();

  for (std::size_t i = 0; i < lines_.size(); ++i) {
    const SparseMatrix& p = lines_[i].projector;
    const double idem = sparse_max_abs((SparseMatrix(p * p) - p).pruned());
    if (idem > kProjectorTol) {
      throw numerical_error("eigenprojector is not idempotent (deviation " +
                            std::to_string(idem) + ")");
    }
    for (std::size_t j = i + 1; j < lines_.size(); ++j) {
      const double cross = sparse_max_abs(SparseMatrix(p * lines_[j].projector));
      if (cross > kProjectorTol) {
        throw numerical_error("eigenprojectors are not mutually orthogonal");
      }
    }
  }

  SparseMatrix sum(d, d);
  for (const auto& line : lines_) sum += line.projector;
  const double completeness = sparse_max_abs((sum - identity).pruned());
  if (completeness > kProjectorTol) {
    throw numerical_error("eigenprojectors do not resolve the identity (deviation " +
                          std::to_string(completeness) + ")");
  }

  // max |M - sum_x x P_x|, scanned against the dense matrix without
  // materializing a second dense copy.
  SparseMatrix recon(d, d);
  for (const auto& line : lines_) {
    recon += SparseMatrix(line.eigenvalue * line.projector);
  }
  Matrix diff = m_;
  for (int k = 0; k < recon.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(recon, k); it; ++it) {
      diff(it.row(), it.col()) -= it.value();
    }
  }
  const double recon_err = diff.cwiseAbs().maxCoeff();
  if (recon_err > recon_tol) {
    throw numerical_error("spectral lines do not reconstruct the observable (deviation " +
                          std::to_string(recon_err) + ")");
  }
}

Observable Observable::spectral_decompose(const Matrix& m, double degeneracy_tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("observable must be square");
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kProjectorTol) {
    throw std::invalid_argument("observable is not Hermitian (deviation " +
                                std::to_string(herm) + ")");
  }
  if (degeneracy_tol <= 0.0) throw std::invalid_argument("degeneracy tolerance must be > 0");

  const Matrix symmetrized = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized);
  if (solver.info() != Eigen::Success) {
    throw numerical_error("eigensolver failed on observable");
  }

  std::vector<std::pair<double, int>> items;
  for (int i = 0; i < m.rows(); ++i) items.emplace_back(solver.eigenvalues()(i), i);

  std::vector<SpectralLine> lines;
  double snap = 0.0;
  for (const auto& cluster : cluster_sorted(std::move(items), degeneracy_tol)) {
    Matrix p = Matrix::Zero(m.rows(), m.cols());
    double value_sum = 0.0;
    for (const auto& [value, col] : cluster) {
      const Vector v = solver.eigenvectors().col(col);
      p.noalias() += v * v.adjoint();
      value_sum += value;
    }
    SpectralLine line;
    line.eigenvalue = value_sum / static_cast<double>(cluster.size());
    for (const auto& [value, col] : cluster) {
      snap = std::max(snap, std::abs(value - line.eigenvalue));
    }
    line.projector = p.sparseView(1.0, 1e-16);
    line.rank = static_cast<int>(cluster.size());
    lines.push_back(std::move(line));
  }
  return Observable(symmetrized, std::move(lines), kProjectorTol + snap);
}

Observable Observable::diagonal(const Eigen::VectorXd& entries, double degeneracy_tol) {
  if (entries.size() < 1) throw std::invalid_argument("diagonal observable is empty");
  if (degeneracy_tol <= 0.0) throw std::invalid_argument("degeneracy tolerance must be > 0");

  std::vector<std::pair<double, int>> items;
  for (int i = 0; i < entries.size(); ++i) items.emplace_back(entries(i), i);

  const int d = static_cast<int>(entries.size());
  std::vector<SpectralLine> lines;
  double snap = 0.0;
  for (const auto& cluster : cluster_sorted(std::move(items), degeneracy_tol)) {
    std::vector<Eigen::Triplet<cplx>> triplets;
    double value_sum = 0.0;
    for (const auto& [value, idx] : cluster) {
      triplets.emplace_back(idx, idx, cplx(1.0, 0.0));
      value_sum += value;
    }
    SpectralLine line;
    line.eigenvalue = value_sum / static_cast<double>(cluster.size());
    for (const auto& [value, idx] : cluster) {
      snap = std::max(snap, std::abs(value - line.eigenvalue));
    }
    line.projector = SparseMatrix(d, d);
    line.projector.setFromTriplets(triplets.begin(), triplets.end());
    line.rank = static_cast<int>(cluster.size());
    lines.push_back(std::move(line));
  }

  Matrix m = entries.cast<cplx>().asDiagonal();
  return Observable(std::move(m), std::move(lines), kProjectorTol + snap);
}

double OutcomeDistribution::mean() const { return moment(1); }

double OutcomeDistribution::moment(int k) const {
  if (k < 1) throw std::invalid_argument("moment order must be >= 1");
  double sum = 0.0;
  for (const auto& e : entries) {
    double power = 1.0;
    for (int i = 0; i < k; ++i) power *= e.eigenvalue;
    sum += power * e.probability;
  }
  return sum;
}

OutcomeDistribution born(const DensityOperator& rho, const Observable& obs) {
  if (rho.dim() != obs.dim()) {
    throw std::invalid_argument("state and observable dimensions differ");
  }
  OutcomeDistribution dist;
  double total = 0.0;
  for (const auto& line : obs.spectrum()) {
    const cplx p = trace_product(rho.matrix(), line.projector);
    if (std::abs(p.imag()) > kImagTol) {
      throw numerical_error("outcome probability has imaginary part " +
                            std::to_string(p.imag()));
    }
    double prob = p.real();
    if (prob < 0.0) {
      if (prob < -kProbabilityClamp) {
        throw numerical_error("outcome probability is negative: " + std::to_string(prob));
      }
      prob = 0.0;
    }
    dist.entries.push_back({line.eigenvalue, prob});
    total += prob;
  }
  if (std::abs(total - 1.0) > kProjectorTol) {
    throw numerical_error("outcome probabilities sum to " + std::to_string(total));
  }
  return dist;
}

double expectation(const DensityOperator& rho, const Observable& obs, int k) {
  return born(rho, obs).moment(k);
}

Projection project(const PureState& psi, const Matrix& proj) {
  if (proj.rows() != proj.cols() || proj.rows() != psi.dim()) {
    throw std::invalid_argument("projector dimension does not match state");
  }
  const double herm = (proj - proj.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kProjectorTol) throw std::invalid_argument("projector is not Hermitian");
  const double idem = (proj * proj - proj).cwiseAbs().maxCoeff();
  if (idem > kProjectorTol) throw std::invalid_argument("projector is not idempotent");

  const Vector projected = proj * psi.amplitudes();
  const double prob = projected.squaredNorm();
  Projection result;
  if (prob < kProbabilityFloor) {
    result.probability = 0.0;
    return result;
  }
  result.probability = prob;
  result.state = PureState(projected / std::sqrt(prob));
  return result;
}

std::pair<double, DensityOperator> conditional_state(const DensityOperator& rho_ab,
                                                     const Matrix& proj_a) {
  if (rho_ab.layout().count() != 2) {
    throw std::invalid_argument("conditional state requires a bipartite layout");
  }
  const int da = rho_ab.layout().dim(0);
  const int db = rho_ab.layout().dim(1);
  if (proj_a.rows() != da || proj_a.cols() != da) {
    throw std::invalid_argument("projector does not act on the first subsystem");
  }
  const double idem = (proj_a * proj_a - proj_a).cwiseAbs().maxCoeff();
  if (idem > kProjectorTol) throw std::invalid_argument("projector is not idempotent");

  Matrix q = Matrix::Zero(da * db, da * db);
  for (int i = 0; i < da; ++i) {
    for (int j = 0; j < da; ++j) {
      if (proj_a(i, j) == cplx(0.0, 0.0)) continue;
      for (int b = 0; b < db; ++b) {
        q(i * db + b, j * db + b) = proj_a(i, j);
      }
    }
  }

  const cplx p = (rho_ab.matrix() * q).trace();
  if (std::abs(p.imag()) > kImagTol) {
    throw numerical_error("outcome probability has imaginary part " +
                          std::to_string(p.imag()));
  }
  const double prob = p.real();
  if (prob < kProbabilityFloor) {
    throw std::invalid_argument("conditional state on a zero-probability outcome");
  }

  const Matrix updated = (q * rho_ab.matrix() * q) / prob;
  const DensityOperator joint(updated, rho_ab.layout());
  return {prob, partial_trace(joint, {1})};
}

Observable collective_sigma_z(int m) {
  if (m < 1 || m > 12) {
    throw std::invalid_argument("collective sigma_z supports 1 <= m <= 12");
  }
  const int d = 1 << m;
  Eigen::VectorXd entries(d);
  for (int i = 0; i < d; ++i) {
    const int ones = std::popcount(static_cast<unsigned>(i));
    entries(i) = static_cast<double>(m - 2 * ones);
  }
  return Observable::diagonal(entries);
}

}  // namespace qens
