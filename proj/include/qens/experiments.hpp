#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "qens/cloning.hpp"
#include "qens/ensemble.hpp"

namespace qens {

inline constexpr const char* kVersion = "0.1.0";

using ParamValue = std::variant<std::int64_t, double, std::string>;

// One named row of numeric results.
struct ReportRow {
  std::string name;
  std::map<std::string, double> values;
};

// Machine-readable experiment output. The canonical JSON form sorts keys at
// every level and prints floats with 17 significant digits, so re-running
// with identical params and seed yields a byte-identical payload.
struct ExperimentReport {
  std::string experiment;
  std::map<std::string, ParamValue> params;
  std::vector<ReportRow> rows;
  std::uint64_t seed = 0;
  std::string version = kVersion;
};

std::string to_canonical_json(const ExperimentReport& report);
// Flat table: header "name" plus the sorted union of row keys; absent values
// are left empty.
std::string to_csv(const ExperimentReport& report);

struct BinomialSpec {
  std::int64_t n = 0;
  std::int64_t m = 0;
  double p = 0.0;
};

// C(n, m) p^m (1-p)^(n-m) with an exact big-integer coefficient and powers
// accumulated in log space. Guarded to n <= 10^6.
double binomial_pmf(const BinomialSpec& spec);
double binomial_pmf(std::int64_t n, std::int64_t m, double p);

// Counts photons passing the |0><0| filter per sampled run of N photons and
// reports the empirical count distribution against the exact binomial
// reference. N must be even.
ExperimentReport filter_experiment(const Ensemble& e, int n_photons,
                                   std::int64_t trials, std::uint64_t seed);

// Success probability of telling a fixed-composition run from an i.i.d. run
// of equal single-particle statistics, using the equal-prior rule "declare
// i.i.d. unless the filter count is exactly N/2": 1 - binomial_pmf(N, N/2, 1/2)/2.
double discrimination_power(int n);
ExperimentReport discrimination_report(int n_max);

// Exact and Monte Carlo moments of the collective spin-z component on windows
// of m = 1..m_max particles for two ensembles. mc_samples = 0 omits the Monte
// Carlo columns.
ExperimentReport moments_experiment(const Ensemble& a, const Ensemble& b, int m_max,
                                    std::int64_t mc_samples, std::uint64_t seed);

// Distance of Bob's two-clone state between Alice's sigma_phi and sigma_z
// settings, per angle, for the perfect and Buzek-Hillery cloners, together
// with the single-particle distance (always zero).
ExperimentReport flash_report(const std::vector<double>& phis);

// Average fidelity and shrinking factor of both cloners. Either column set
// may be switched off; at least one must stay.
ExperimentReport clone_report(std::int64_t samples, std::uint64_t seed,
                              bool with_fidelity = true, bool with_shrinking = true);

}  // namespace qens
