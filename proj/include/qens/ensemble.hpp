#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "qens/rng.hpp"
#include "qens/state.hpp"

namespace qens {

// A preparation process emitting one qubit at a time, with each draw
// independent and identically distributed over the member states.
class IIDEnsemble {
 public:
  explicit IIDEnsemble(std::vector<std::pair<double, PureState>> members);

  const std::vector<std::pair<double, PureState>>& members() const { return members_; }

 private:
  std::vector<std::pair<double, PureState>> members_;
};

// A periodic preparation sequence observed from a uniformly random offset.
// The emitted states are deterministic once the offset is drawn.
class SequenceEnsemble {
 public:
  explicit SequenceEnsemble(std::vector<PureState> pattern);

  const std::vector<PureState>& pattern() const { return pattern_; }
  int period() const { return static_cast<int>(pattern_.size()); }

 private:
  std::vector<PureState> pattern_;
};

// A finite run of N preparations with exactly known composition, emitted in a
// uniformly random order.
class FiniteCompositionEnsemble {
 public:
  FiniteCompositionEnsemble(int n_total, std::vector<std::pair<PureState, int>> counts);

  int n_total() const { return n_total_; }
  const std::vector<std::pair<PureState, int>>& counts() const { return counts_; }

 private:
  int n_total_;
  std::vector<std::pair<PureState, int>> counts_;
};

using Ensemble = std::variant<IIDEnsemble, SequenceEnsemble, FiniteCompositionEnsemble>;

// The states an ensemble can emit, indexed as sample_indices reports them:
// IID members, sequence pattern entries, or finite-composition species.
std::vector<PureState> state_table(const Ensemble& e);

// Reduced operator of a single emitted particle.
DensityOperator single_particle_operator(const Ensemble& e);

// Operator of m consecutive emitted particles (a measurement window), laid
// out as m qubits. Guards: m <= 12; for FiniteComposition, m <= N <= 12.
DensityOperator window_operator(const Ensemble& e, int m);

// First and second moments of the collective spin-z component on a window of
// m particles, computed from the exact window operator.
struct SigmaZMoments {
  double mean = 0.0;
  double second_moment = 0.0;
};
SigmaZMoments sigma_z_moment_table(const Ensemble& e, int m);

// Indices into state_table for n consecutive emitted particles. For
// FiniteComposition n must equal N (the run is emitted as a whole).
std::vector<int> sample_indices(const Ensemble& e, int n, Rng& rng);

// n consecutive emitted states. Deterministic for a given seed.
std::vector<PureState> sample(const Ensemble& e, int n, std::uint64_t seed);

// Built-in ensembles. E3 is the period-2 sequence |1>,|0>; E4 the period-2
// sequence |+>,|->; E5 a finite run of N/2 |0> and N/2 |1>; E6 a finite run
// of N/2 |+> and N/2 |->. n_total applies to E5/E6 and must be even.
Ensemble built_in_ensemble(const std::string& name, int n_total = 12);
bool is_built_in_ensemble(const std::string& name);

}  // namespace qens
