#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qens/rng.hpp"
#include "qens/state.hpp"

namespace qens {

// A 1 -> 2 qubit cloning channel. The Buzek-Hillery machine is the physical
// one: a three-qubit unitary acting on signal, blank, and ancilla, with the
// ancilla traced out afterwards. The hypothetical perfect cloner maps every
// pure input to two exact copies; no such linear map exists, and it is kept
// only as the contrast case for the signaling experiment.
class CloningChannel {
 public:
  enum class Kind { buzek_hillery, perfect_hypothetical };

  // blank and ancilla pick the computational basis state (0 or 1) loaded
  // into the corresponding register.
  static CloningChannel buzek_hillery(int blank = 0, int ancilla = 0);
  static CloningChannel perfect();

  Kind kind() const { return kind_; }
  bool is_perfect() const { return kind_ == Kind::perfect_hypothetical; }

  // Buzek-Hillery data; throws for the perfect cloner, which has no unitary.
  const Matrix& unitary() const;
  const PureState& blank() const;
  const PureState& ancilla() const;

 private:
  CloningChannel(Kind kind, Matrix unitary, std::vector<PureState> registers);

  Kind kind_;
  Matrix unitary_;
  std::vector<PureState> registers_;
};

// Three-qubit pure output U(psi x blank x ancilla) of the Buzek-Hillery
// machine, ordered signal, blank, ancilla.
PureState bh_output_state(const CloningChannel& c, const PureState& psi);

struct CloneResult {
  DensityOperator joint;    // both clones, ancilla traced out; layout [2,2]
  DensityOperator clone_a;  // first clone
  DensityOperator clone_b;  // second clone
};
CloneResult clone(const CloningChannel& c, const PureState& psi);

// <psi| rho |psi> for a qubit clone against the original input.
double single_clone_fidelity(const PureState& psi, const DensityOperator& clone);

// Monte Carlo average of both single-clone fidelities over Haar-random
// inputs. Sample i draws from substream (seed, i), so the result does not
// depend on evaluation order.
double average_fidelity(const CloningChannel& c, int n_samples, std::uint64_t seed);

// Same average for an arbitrary map psi -> (clone_a, clone_b).
using CloneMap = std::function<std::pair<DensityOperator, DensityOperator>(const PureState&)>;
double average_fidelity(const CloneMap& map, int n_samples, std::uint64_t seed);

// Common Bloch shrinking factor eta with bloch_of(clone) = eta * bloch_of(input)
// fitted over the probes. Probes must span all three Bloch directions; if the
// per-probe factors disagree beyond 1e-8 the channel is not universal and an
// error is raised.
double shrinking_factor(const CloningChannel& c, const std::vector<PureState>& probes);
using SingleCloneMap = std::function<DensityOperator(const PureState&)>;
double shrinking_factor(const SingleCloneMap& map, const std::vector<PureState>& probes);

// The six cardinal Bloch directions (+-x, +-y, +-z).
std::vector<PureState> default_probe_states();

// Bob's two-clone state in the superluminal-signaling setup: Alice and Bob
// share the Bell state (|00> + |11>)/sqrt(2), Alice measures
// sigma_phi = cos(phi) sigma_z + sin(phi) sigma_x (phi = 0 is the sigma_z
// setting), and Bob clones his half. Returns the mixture of joint clone
// states weighted by Alice's outcome probabilities. phi must lie in [0, 2*pi).
DensityOperator flash_experiment(const CloningChannel& c, double phi);

}  // namespace qens
