#include "qens/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>

#include "qens/measurement.hpp"

namespace qens {

namespace {

void require_qubit(const PureState& psi) {
  if (psi.dim() != 2) throw std::invalid_argument("ensemble members must be qubits");
}

void check_window_guards(const Ensemble& e, int m) {
  if (m < 1) throw std::invalid_argument("window length must be >= 1");
  if (m > 12) throw std::invalid_argument("window length is limited to 12 qubits");
  if (const auto* fin = std::get_if<FiniteCompositionEnsemble>(&e)) {
    if (fin->n_total() > 12) {
      throw std::invalid_argument("finite-composition windows require N <= 12");
    }
    if (m > fin->n_total()) {
      throw std::invalid_argument("window length exceeds the run length N");
    }
  }
}

// Window operator of a finite run: mixture over ordered draws without
// replacement. Memoized on the vector of remaining per-species counts; the
// number of draws left is determined by that vector.
class FiniteWindowBuilder {
 public:
  FiniteWindowBuilder(const FiniteCompositionEnsemble& e, int m)
      : species_(e.counts()), m_(m) {
    for (const auto& [psi, count] : species_) total_ += count;
  }

  Matrix build() {
    std::vector<int> counts;
    for (const auto& [psi, count] : species_) counts.push_back(count);
    return window(counts, m_);
  }

 private:
  Matrix window(const std::vector<int>& counts, int draws_left) {
    if (draws_left == 0) return Matrix::Ones(1, 1);
    if (auto it = memo_.find(counts); it != memo_.end()) return it->second;

    const int remaining = std::accumulate(counts.begin(), counts.end(), 0);
    const int d = 1 << draws_left;
    Matrix result = Matrix::Zero(d, d);
    for (std::size_t s = 0; s < counts.size(); ++s) {
      if (counts[s] == 0) continue;
      std::vector<int> next = counts;
      --next[s];
      const double weight = static_cast<double>(counts[s]) / remaining;
      const Matrix head = projector(species_[s].first);
      result.noalias() +=
          weight * Eigen::kroneckerProduct(head, window(next, draws_left - 1)).eval();
    }
    memo_.emplace(counts, result);
    return result;
  }

  const std::vector<std::pair<PureState, int>>& species_;
  int m_ = 0;
  int total_ = 0;
  std::map<std::vector<int>, Matrix> memo_;
};

}  // namespace

IIDEnsemble::IIDEnsemble(std::vector<std::pair<double, PureState>> members)
    : members_(std::move(members)) {
  if (members_.empty()) throw std::invalid_argument("ensemble has no members");
  double total = 0.0;
  for (const auto& [p, psi] : members_) {
    require_qubit(psi);
    if (p < 0.0) throw std::invalid_argument("member probability is negative");
    total += p;
  }
  if (std::abs(total - 1.0) > kTraceTol) {
    throw std::invalid_argument("member probabilities do not sum to one");
  }
}

SequenceEnsemble::SequenceEnsemble(std::vector<PureState> pattern)
    : pattern_(std::move(pattern)) {
  if (pattern_.empty()) throw std::invalid_argument("sequence pattern is empty");
  for (const auto& psi : pattern_) require_qubit(psi);
}

FiniteCompositionEnsemble::FiniteCompositionEnsemble(
    int n_total, std::vector<std::pair<PureState, int>> counts)
    : n_total_(n_total), counts_(std::move(counts)) {
  if (n_total_ < 1) throw std::invalid_argument("run length N must be >= 1");
  if (counts_.empty()) throw std::invalid_argument("composition has no species");
  int total = 0;
  for (const auto& [psi, count] : counts_) {
    require_qubit(psi);
    if (count < 0) throw std::invalid_argument("species count is negative");
    total += count;
  }
  if (total != n_total_) {
    throw std::invalid_argument("species counts do not sum to the run length N");
  }
}

std::vector<PureState> state_table(const Ensemble& e) {
  return std::visit(
      [](const auto& ensemble) {
        std::vector<PureState> states;
        using T = std::decay_t<decltype(ensemble)>;
        if constexpr (std::is_same_v<T, IIDEnsemble>) {
          for (const auto& [p, psi] : ensemble.members()) states.push_back(psi);
        } else if constexpr (std::is_same_v<T, SequenceEnsemble>) {
          states = ensemble.pattern();
        } else {
          for (const auto& [psi, count] : ensemble.counts()) states.push_back(psi);
        }
        return states;
      },
      e);
}

DensityOperator single_particle_operator(const Ensemble& e) {
  return std::visit(
      [](const auto& ensemble) {
        using T = std::decay_t<decltype(ensemble)>;
        std::vector<std::pair<double, PureState>> members;
        if constexpr (std::is_same_v<T, IIDEnsemble>) {
          members = ensemble.members();
        } else if constexpr (std::is_same_v<T, SequenceEnsemble>) {
          const double p = 1.0 / ensemble.period();
          for (const auto& psi : ensemble.pattern()) members.emplace_back(p, psi);
        } else {
          const double n = ensemble.n_total();
          for (const auto& [psi, count] : ensemble.counts()) {
            members.emplace_back(count / n, psi);
          }
        }
        return from_ensemble(members);
      },
      e);
}

DensityOperator window_operator(const Ensemble& e, int m) {
  check_window_guards(e, m);
  return std::visit(
      [m](const auto& ensemble) {
        using T = std::decay_t<decltype(ensemble)>;
        if constexpr (std::is_same_v<T, IIDEnsemble>) {
          const Matrix rho1 = from_ensemble(ensemble.members()).matrix();
          Matrix w = rho1;
          for (int i = 1; i < m; ++i) {
            w = Eigen::kroneckerProduct(w, rho1).eval();
          }
          return DensityOperator(std::move(w), qubits(m));
        } else if constexpr (std::is_same_v<T, SequenceEnsemble>) {
          const int period = ensemble.period();
          std::vector<std::pair<double, PureState>> members;
          for (int o = 0; o < period; ++o) {
            std::vector<PureState> factors;
            for (int i = 0; i < m; ++i) {
              factors.push_back(ensemble.pattern()[(o + i) % period]);
            }
            members.emplace_back(1.0 / period, tensor_all(factors));
          }
          return from_ensemble(members, qubits(m));
        } else {
          FiniteWindowBuilder builder(ensemble, m);
          return DensityOperator(builder.build(), qubits(m));
        }
      },
      e);
}

SigmaZMoments sigma_z_moment_table(const Ensemble& e, int m) {
  const DensityOperator w = window_operator(e, m);
  const OutcomeDistribution dist = born(w, collective_sigma_z(m));
  return {dist.moment(1), dist.moment(2)};
}

std::vector<int> sample_indices(const Ensemble& e, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample length must be >= 1");
  return std::visit(
      [n, &rng](const auto& ensemble) {
        using T = std::decay_t<decltype(ensemble)>;
        std::vector<int> indices;
        indices.reserve(static_cast<std::size_t>(n));
        if constexpr (std::is_same_v<T, IIDEnsemble>) {
          const auto& members = ensemble.members();
          for (int i = 0; i < n; ++i) {
            const double u = rng.uniform();
            double cumulative = 0.0;
            int pick = static_cast<int>(members.size()) - 1;
            for (std::size_t k = 0; k < members.size(); ++k) {
              cumulative += members[k].first;
              if (u < cumulative) {
                pick = static_cast<int>(k);
                break;
              }
            }
            indices.push_back(pick);
          }
        } else if constexpr (std::is_same_v<T, SequenceEnsemble>) {
          const int period = ensemble.period();
          const int offset = static_cast<int>(rng.below(static_cast<std::uint64_t>(period)));
          for (int i = 0; i < n; ++i) indices.push_back((offset + i) % period);
        } else {
          if (n != ensemble.n_total()) {
            throw std::invalid_argument(
                "finite-composition runs are emitted whole: n must equal N");
          }
          for (std::size_t s = 0; s < ensemble.counts().size(); ++s) {
            for (int c = 0; c < ensemble.counts()[s].second; ++c) {
              indices.push_back(static_cast<int>(s));
            }
          }
          for (int i = n - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)));
            std::swap(indices[static_cast<std::size_t>(i)],
                      indices[static_cast<std::size_t>(j)]);
          }
        }
        return indices;
      },
      e);
}

std::vector<PureState> sample(const Ensemble& e, int n, std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<int> indices = sample_indices(e, n, rng);
  const std::vector<PureState> table = state_table(e);
  std::vector<PureState> states;
  states.reserve(indices.size());
  for (int idx : indices) states.push_back(table[static_cast<std::size_t>(idx)]);
  return states;
}

Ensemble built_in_ensemble(const std::string& name, int n_total) {
  if (name == "E3") return SequenceEnsemble({ket1(), ket0()});
  if (name == "E4") return SequenceEnsemble({ket_plus(), ket_minus()});
  if (name == "E5" || name == "E6") {
    if (n_total < 2 || n_total % 2 != 0) {
      throw std::invalid_argument(name + " requires an even run length N >= 2");
    }
    const int half = n_total / 2;
    if (name == "E5") {
      return FiniteCompositionEnsemble(n_total, {{ket0(), half}, {ket1(), half}});
    }
    return FiniteCompositionEnsemble(n_total, {{ket_plus(), half}, {ket_minus(), half}});
  }
  throw std::invalid_argument("unknown ensemble name: " + name);
}

bool is_built_in_ensemble(const std::string& name) {
  return name == "E3" || name == "E4" || name == "E5" || name == "E6";
}

}  // namespace qens
