#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qens/experiments.hpp"
#include "qens/io.hpp"

namespace {

qens::Ensemble resolve_ensemble(const std::string& token, int n_total) {
  if (qens::is_built_in_ensemble(token)) {
    return qens::built_in_ensemble(token, n_total);
  }
  return qens::load_ensemble_file(token);
}

void emit(const qens::ExperimentReport& report, const std::string& format,
          const std::string& out_path) {
  const std::string payload =
      format == "csv" ? qens::to_csv(report) : qens::to_canonical_json(report);
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
  out << payload;
}

struct OutputOptions {
  std::string format = "json";
  std::string out_path;
};

void add_output_options(CLI::App* cmd, OutputOptions& opts) {
  cmd->add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", opts.out_path, "write the report to a file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qens: statistics of equally-prepared quantum ensembles, approximate "
      "cloning, and the signaling bounds that connect them"};
  app.require_subcommand(1);

  // moments
  auto* moments = app.add_subcommand(
      "moments", "exact and sampled collective spin-z moments for an ensemble pair");
  std::vector<std::string> pair;
  int m_max = 6;
  std::int64_t mc_samples = 100000;
  int moments_n_total = 12;
  std::uint64_t moments_seed = 0;
  OutputOptions moments_out;
  moments->add_option("--pair", pair,
                      "two ensembles, comma separated: built-in names "
                      "(E3,E4,E5,E6) or definition file paths")
      ->required()
      ->delimiter(',');
  moments->add_option("--m-max", m_max, "largest window length (1..12)");
  moments->add_option("--mc-samples", mc_samples,
                      "Monte Carlo samples per table cell; 0 disables sampling");
  moments->add_option("--n-total", moments_n_total,
                      "run length N for the finite built-ins E5 and E6");
  moments->add_option("--seed", moments_seed, "RNG seed");
  add_output_options(moments, moments_out);
  moments->callback([&] {
    if (pair.size() != 2) {
      throw std::invalid_argument("--pair needs exactly two ensembles");
    }
    const qens::Ensemble a = resolve_ensemble(pair[0], moments_n_total);
    const qens::Ensemble b = resolve_ensemble(pair[1], moments_n_total);
    qens::ExperimentReport report =
        qens::moments_experiment(a, b, m_max, mc_samples, moments_seed);
    report.params["ensemble_a"] = pair[0];
    report.params["ensemble_b"] = pair[1];
    emit(report, moments_out.format, moments_out.out_path);
  });

  // filter
  auto* filter = app.add_subcommand(
      "filter", "per-run photon counts behind a |0><0| polarization filter");
  std::string filter_name;
  std::string filter_file;
  int filter_n = 0;
  std::int64_t filter_trials = 0;
  std::uint64_t filter_seed = 0;
  OutputOptions filter_out;
  filter->add_option("--ensemble", filter_name,
                     "built-in ensemble name (E3,E4,E5,E6)");
  filter->add_option("--ensemble-file", filter_file, "ensemble definition file");
  filter->add_option("--n", filter_n, "photons per run (even)")->required();
  filter->add_option("--trials", filter_trials, "number of runs")->required();
  filter->add_option("--seed", filter_seed, "RNG seed");
  add_output_options(filter, filter_out);
  filter->callback([&] {
    if (filter_name.empty() == filter_file.empty()) {
      throw std::invalid_argument("pass exactly one of --ensemble or --ensemble-file");
    }
    const qens::Ensemble e = filter_name.empty()
                                 ? qens::load_ensemble_file(filter_file)
                                 : qens::built_in_ensemble(filter_name, filter_n);
    qens::ExperimentReport report =
        qens::filter_experiment(e, filter_n, filter_trials, filter_seed);
    report.params["ensemble"] = filter_name.empty() ? filter_file : filter_name;
    emit(report, filter_out.format, filter_out.out_path);
  });

  // discriminate
  auto* discriminate = app.add_subcommand(
      "discriminate",
      "success probability of telling a fixed-composition run from an i.i.d. run");
  int n_max = 200;
  OutputOptions discriminate_out;
  discriminate->add_option("--n-max", n_max, "largest run length (even steps from 2)");
  add_output_options(discriminate, discriminate_out);
  discriminate->callback([&] {
    emit(qens::discrimination_report(n_max), discriminate_out.format,
         discriminate_out.out_path);
  });

  // flash
  auto* flash = app.add_subcommand(
      "flash",
      "distance of Bob's cloned pair between measurement settings of Alice");
  std::vector<double> phis;
  OutputOptions flash_out;
  flash->add_option("--phis", phis, "angles phi in [0, 2*pi), comma separated")
      ->required()
      ->delimiter(',');
  add_output_options(flash, flash_out);
  flash->callback([&] { emit(qens::flash_report(phis), flash_out.format, flash_out.out_path); });

  // clone
  auto* clone_cmd = app.add_subcommand(
      "clone", "fidelity and shrinking factor of the cloning channels");
  bool with_fidelity = false;
  bool with_shrinking = false;
  std::int64_t clone_samples = 10000;
  std::uint64_t clone_seed = 0;
  OutputOptions clone_out;
  clone_cmd->add_flag("--fidelity", with_fidelity,
                      "report the Monte Carlo average fidelity");
  clone_cmd->add_flag("--shrinking", with_shrinking, "report the shrinking factor");
  clone_cmd->add_option("--samples", clone_samples, "Haar-random input samples");
  clone_cmd->add_option("--seed", clone_seed, "RNG seed");
  add_output_options(clone_cmd, clone_out);
  clone_cmd->callback([&] {
    const bool both = with_fidelity == with_shrinking;
    emit(qens::clone_report(clone_samples, clone_seed, both || with_fidelity,
                            both || with_shrinking),
         clone_out.format, clone_out.out_path);
  });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const qens::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
