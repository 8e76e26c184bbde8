#include "qens/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <gmp.h>

#include "qens/measurement.hpp"

namespace qens {

namespace {

void append_double(std::string& out, double value) {
  if (!std::isfinite(value)) {
    throw numerical_error("report contains a non-finite value");
  }
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  out += buffer;
}

void append_json_string(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buffer[8];
          std::snprintf(buffer, sizeof(buffer), "\\u%04x", c);
          out += buffer;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void append_param(std::string& out, const ParamValue& value) {
  if (const auto* i = std::get_if<std::int64_t>(&value)) {
    out += std::to_string(*i);
  } else if (const auto* d = std::get_if<double>(&value)) {
    append_double(out, *d);
  } else {
    append_json_string(out, std::get<std::string>(value));
  }
}

std::string format_name(const char* prefix, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%s=%.6g", prefix, value);
  return buffer;
}

// Probability that a photon in the given state passes the |0><0| filter.
double pass_probability(const PureState& psi) {
  return std::norm(psi.amplitude(0));
}

struct McMoments {
  double mean = 0.0;
  double mean_se = 0.0;
  double second = 0.0;
  double second_se = 0.0;
};

// Empirical moments of the collective spin-z value over sampled windows,
// measuring each emitted qubit in the sigma_z basis. Works on state-table
// indices so no per-trial state objects are allocated.
McMoments mc_sigma_z_moments(const Ensemble& e, int m, std::int64_t trials,
                             std::uint64_t group_seed) {
  const std::vector<PureState> table = state_table(e);
  std::vector<double> prob0;
  prob0.reserve(table.size());
  for (const auto& psi : table) prob0.push_back(pass_probability(psi));

  int draw_length = m;
  if (const auto* fin = std::get_if<FiniteCompositionEnsemble>(&e)) {
    draw_length = fin->n_total();
  }

  double s1 = 0.0;
  double s2 = 0.0;
  double s4 = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(group_seed, static_cast<std::uint64_t>(t));
    const std::vector<int> indices = sample_indices(e, draw_length, rng);
    double spin_sum = 0.0;
    for (int i = 0; i < m; ++i) {
      const bool up = rng.uniform() < prob0[static_cast<std::size_t>(indices[i])];
      spin_sum += up ? 1.0 : -1.0;
    }
    s1 += spin_sum;
    const double sq = spin_sum * spin_sum;
    s2 += sq;
    s4 += sq * sq;
  }

  const double n = static_cast<double>(trials);
  McMoments result;
  result.mean = s1 / n;
  result.second = s2 / n;
  result.mean_se = std::sqrt(std::max(0.0, result.second - result.mean * result.mean) / n);
  result.second_se = std::sqrt(std::max(0.0, s4 / n - result.second * result.second) / n);
  return result;
}

}  // namespace

std::string to_canonical_json(const ExperimentReport& report) {
  std::string out = "{\"experiment\":";
  append_json_string(out, report.experiment);
  out += ",\"params\":{";
  bool first = true;
  for (const auto& [key, value] : report.params) {
    if (!first) out += ',';
    first = false;
    append_json_string(out, key);
    out += ':';
    append_param(out, value);
  }
  out += "},\"results\":[";
  first = true;
  for (const auto& row : report.rows) {
    if (!first) out += ',';
    first = false;
    out += "{\"name\":";
    append_json_string(out, row.name);
    out += ",\"values\":{";
    bool first_value = true;
    for (const auto& [key, value] : row.values) {
      if (!first_value) out += ',';
      first_value = false;
      append_json_string(out, key);
      out += ':';
      append_double(out, value);
    }
    out += "}}";
  }
  out += "],\"seed\":";
  out += std::to_string(report.seed);
  out += ",\"version\":";
  append_json_string(out, report.version);
  out += "}\n";
  return out;
}

std::string to_csv(const ExperimentReport& report) {
  std::set<std::string> keys;
  for (const auto& row : report.rows) {
    for (const auto& [key, value] : row.values) keys.insert(key);
  }
  std::string out = "name";
  for (const auto& key : keys) {
    out += ',';
    out += key;
  }
  out += '\n';
  for (const auto& row : report.rows) {
    out += row.name;
    for (const auto& key : keys) {
      out += ',';
      if (auto it = row.values.find(key); it != row.values.end()) {
        append_double(out, it->second);
      }
    }
    out += '\n';
  }
  return out;
}

double binomial_pmf(const BinomialSpec& spec) {
  if (spec.n < 0 || spec.m < 0 || spec.m > spec.n) {
    throw std::invalid_argument("binomial spec requires 0 <= m <= n");
  }
  if (spec.n > 1'000'000) {
    throw std::invalid_argument("binomial pmf is guarded to n <= 10^6");
  }
  if (spec.p < 0.0 || spec.p > 1.0) {
    throw std::invalid_argument("binomial probability must lie in [0, 1]");
  }
  if (spec.p == 0.0) return spec.m == 0 ? 1.0 : 0.0;
  if (spec.p == 1.0) return spec.m == spec.n ? 1.0 : 0.0;

  mpz_t coefficient;
  mpz_init(coefficient);
  mpz_bin_uiui(coefficient, static_cast<unsigned long>(spec.n),
               static_cast<unsigned long>(spec.m));
  long exponent = 0;
  const double fraction = mpz_get_d_2exp(&exponent, coefficient);
  mpz_clear(coefficient);

  constexpr double ln2 = 0.69314718055994530941723212145818;
  const double log_pmf = std::log(fraction) + static_cast<double>(exponent) * ln2 +
                         static_cast<double>(spec.m) * std::log(spec.p) +
                         static_cast<double>(spec.n - spec.m) * std::log1p(-spec.p);
  return std::exp(log_pmf);
}

double binomial_pmf(std::int64_t n, std::int64_t m, double p) {
  return binomial_pmf(BinomialSpec{n, m, p});
}

ExperimentReport filter_experiment(const Ensemble& e, int n_photons,
                                   std::int64_t trials, std::uint64_t seed) {
  if (n_photons < 2 || n_photons % 2 != 0) {
    throw std::invalid_argument("filter runs require an even photon count N >= 2");
  }
  if (trials < 1) throw std::invalid_argument("trial count must be >= 1");

  const std::vector<PureState> table = state_table(e);
  std::vector<double> prob0;
  prob0.reserve(table.size());
  for (const auto& psi : table) prob0.push_back(pass_probability(psi));

  std::vector<std::int64_t> histogram(static_cast<std::size_t>(n_photons) + 1, 0);
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(t));
    const std::vector<int> indices = sample_indices(e, n_photons, rng);
    int passed = 0;
    for (int idx : indices) {
      if (rng.uniform() < prob0[static_cast<std::size_t>(idx)]) ++passed;
    }
    ++histogram[static_cast<std::size_t>(passed)];
  }

  ExperimentReport report;
  report.experiment = "filter";
  report.seed = seed;
  report.params["n"] = static_cast<std::int64_t>(n_photons);
  report.params["trials"] = trials;

  double mean_count = 0.0;
  for (int k = 0; k <= n_photons; ++k) {
    const double frequency =
        static_cast<double>(histogram[static_cast<std::size_t>(k)]) /
        static_cast<double>(trials);
    mean_count += static_cast<double>(k) * frequency;
    ReportRow row;
    row.name = "count=" + std::to_string(k);
    row.values["count"] = static_cast<double>(k);
    row.values["frequency"] = frequency;
    row.values["binomial_reference"] = binomial_pmf(n_photons, k, 0.5);
    report.rows.push_back(std::move(row));
  }

  ReportRow summary;
  summary.name = "summary";
  summary.values["mean_count"] = mean_count;
  summary.values["frequency_at_half"] =
      static_cast<double>(histogram[static_cast<std::size_t>(n_photons / 2)]) /
      static_cast<double>(trials);
  report.rows.push_back(std::move(summary));
  return report;
}

double discrimination_power(int n) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("discrimination power requires an even N >= 2");
  }
  return 1.0 - 0.5 * binomial_pmf(n, n / 2, 0.5);
}

ExperimentReport discrimination_report(int n_max) {
  if (n_max < 2) throw std::invalid_argument("n-max must be >= 2");
  ExperimentReport report;
  report.experiment = "discriminate";
  report.params["n_max"] = static_cast<std::int64_t>(n_max);
  report.params["decision_rule"] =
      std::string("declare iid unless the filter count is exactly N/2");
  for (int n = 2; n <= n_max; n += 2) {
    ReportRow row;
    row.name = "n=" + std::to_string(n);
    row.values["n"] = static_cast<double>(n);
    row.values["pmf_at_half"] = binomial_pmf(n, n / 2, 0.5);
    row.values["power"] = discrimination_power(n);
    report.rows.push_back(std::move(row));
  }
  return report;
}

ExperimentReport moments_experiment(const Ensemble& a, const Ensemble& b, int m_max,
                                    std::int64_t mc_samples, std::uint64_t seed) {
  if (m_max < 1 || m_max > 12) {
    throw std::invalid_argument("m-max must lie in 1..12");
  }
  if (mc_samples < 0) throw std::invalid_argument("mc-samples must be >= 0");

  ExperimentReport report;
  report.experiment = "moments";
  report.seed = seed;
  report.params["m_max"] = static_cast<std::int64_t>(m_max);
  report.params["mc_samples"] = mc_samples;

  for (int m = 1; m <= m_max; ++m) {
    ReportRow row;
    row.name = "m=" + std::to_string(m);
    row.values["m"] = static_cast<double>(m);

    const SigmaZMoments exact_a = sigma_z_moment_table(a, m);
    const SigmaZMoments exact_b = sigma_z_moment_table(b, m);
    row.values["exact_mean_a"] = exact_a.mean;
    row.values["exact_second_a"] = exact_a.second_moment;
    row.values["exact_mean_b"] = exact_b.mean;
    row.values["exact_second_b"] = exact_b.second_moment;

    if (mc_samples > 0) {
      const McMoments mc_a =
          mc_sigma_z_moments(a, m, mc_samples,
                             substream_seed(seed, static_cast<std::uint64_t>(m)));
      const McMoments mc_b =
          mc_sigma_z_moments(b, m, mc_samples,
                             substream_seed(seed, static_cast<std::uint64_t>(16 + m)));
      row.values["mc_mean_a"] = mc_a.mean;
      row.values["mc_mean_se_a"] = mc_a.mean_se;
      row.values["mc_second_a"] = mc_a.second;
      row.values["mc_second_se_a"] = mc_a.second_se;
      row.values["mc_mean_b"] = mc_b.mean;
      row.values["mc_mean_se_b"] = mc_b.mean_se;
      row.values["mc_second_b"] = mc_b.second;
      row.values["mc_second_se_b"] = mc_b.second_se;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

// Bob's unconditioned single-particle state for a given setting of Alice:
// the probability-weighted mixture of his conditional states, before cloning.
DensityOperator bob_single_particle(double phi) {
  const DensityOperator bell = DensityOperator::pure(
      PureState([] {
        Vector v = Vector::Zero(4);
        v(0) = 1.0 / std::sqrt(2.0);
        v(3) = 1.0 / std::sqrt(2.0);
        return v;
      }()),
      qubits(2));
  const Observable setting = Observable::spectral_decompose(sigma_phi(phi));
  Matrix single = Matrix::Zero(2, 2);
  for (const auto& line : setting.spectrum()) {
    const auto [prob, bob] = conditional_state(bell, Matrix(line.projector));
    single.noalias() += prob * bob.matrix();
  }
  return DensityOperator(std::move(single), qubits(1));
}

}  // namespace

ExperimentReport flash_report(const std::vector<double>& phis) {
  if (phis.empty()) throw std::invalid_argument("flash report needs at least one angle");

  const CloningChannel perfect = CloningChannel::perfect();
  const CloningChannel bh = CloningChannel::buzek_hillery();

  const DensityOperator perfect_ref = flash_experiment(perfect, 0.0);
  const DensityOperator bh_ref = flash_experiment(bh, 0.0);
  const DensityOperator single_ref = bob_single_particle(0.0);

  ExperimentReport report;
  report.experiment = "flash";
  report.params["n_phis"] = static_cast<std::int64_t>(phis.size());

  for (double phi : phis) {
    ReportRow row;
    row.name = format_name("phi", phi);
    row.values["phi"] = phi;
    row.values["perfect_distance"] =
        trace_distance(flash_experiment(perfect, phi), perfect_ref);
    row.values["bh_distance"] = trace_distance(flash_experiment(bh, phi), bh_ref);
    row.values["single_particle_distance"] =
        trace_distance(bob_single_particle(phi), single_ref);
    report.rows.push_back(std::move(row));
  }
  return report;
}

ExperimentReport clone_report(std::int64_t samples, std::uint64_t seed,
                              bool with_fidelity, bool with_shrinking) {
  if (samples < 1) throw std::invalid_argument("sample count must be >= 1");
  if (samples > 100'000'000) throw std::invalid_argument("sample count is too large");
  if (!with_fidelity && !with_shrinking) {
    throw std::invalid_argument("clone report needs at least one column set");
  }

  ExperimentReport report;
  report.experiment = "clone";
  report.seed = seed;
  report.params["samples"] = samples;

  const std::vector<PureState> probes = default_probe_states();
  const struct {
    const char* name;
    CloningChannel channel;
  } cases[] = {
      {"buzek_hillery", CloningChannel::buzek_hillery()},
      {"perfect_hypothetical", CloningChannel::perfect()},
  };
  for (const auto& entry : cases) {
    ReportRow row;
    row.name = entry.name;
    if (with_fidelity) {
      row.values["average_fidelity"] =
          average_fidelity(entry.channel, static_cast<int>(samples), seed);
    }
    if (with_shrinking) {
      const double eta = shrinking_factor(entry.channel, probes);
      row.values["shrinking_factor"] = eta;
      row.values["fidelity_from_eta"] = 0.5 * (1.0 + eta);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace qens
