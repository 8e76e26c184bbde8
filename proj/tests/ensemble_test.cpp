#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qens/ensemble.hpp"
#include "qens/measurement.hpp"
#include "qens/rng.hpp"
#include "qens/state.hpp"
#include "test_support.hpp"

using namespace qens;

namespace {

// Finite-run window by full enumeration: every distinct arrangement of the
// run is equally likely, and the window sees its first m entries. Independent
// of the library's memoized recursion.
Matrix enumerated_finite_window(const std::vector<std::pair<PureState, int>>& counts,
                                int m) {
  std::vector<int> arrangement;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    for (int c = 0; c < counts[s].second; ++c) {
      arrangement.push_back(static_cast<int>(s));
    }
  }
  std::sort(arrangement.begin(), arrangement.end());

  const int d = 1 << m;
  Matrix sum = Matrix::Zero(d, d);
  int n_arrangements = 0;
  do {
    std::vector<PureState> window;
    for (int i = 0; i < m; ++i) {
      window.push_back(counts[static_cast<std::size_t>(arrangement[i])].first);
    }
    sum += projector(tensor_all(window));
    ++n_arrangements;
  } while (std::next_permutation(arrangement.begin(), arrangement.end()));
  return sum / static_cast<double>(n_arrangements);
}

bool is_state(const PureState& psi, const PureState& target) {
  return std::abs(std::abs(psi.overlap(target)) - 1.0) < 1e-12;
}

}  // namespace

TEST_CASE("ensemble constructors validate their inputs") {
  CHECK_THROWS_AS(IIDEnsemble({}), std::invalid_argument);
  CHECK_THROWS_AS(IIDEnsemble({{-0.5, ket0()}, {1.5, ket1()}}), std::invalid_argument);
  CHECK_THROWS_AS(IIDEnsemble({{0.5, ket0()}, {0.4, ket1()}}), std::invalid_argument);
  CHECK_THROWS_AS(IIDEnsemble({{1.0, ket("00")}}), std::invalid_argument);

  CHECK_THROWS_AS(SequenceEnsemble({}), std::invalid_argument);
  CHECK_THROWS_AS(SequenceEnsemble({ket("00")}), std::invalid_argument);

  CHECK_THROWS_AS(FiniteCompositionEnsemble(0, {{ket0(), 0}}), std::invalid_argument);
  CHECK_THROWS_AS(FiniteCompositionEnsemble(2, {}), std::invalid_argument);
  CHECK_THROWS_AS(FiniteCompositionEnsemble(2, {{ket0(), -1}, {ket1(), 3}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FiniteCompositionEnsemble(3, {{ket0(), 1}, {ket1(), 1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FiniteCompositionEnsemble(1, {{ket("00"), 1}}), std::invalid_argument);
}

TEST_CASE("all four built-in ensembles share the maximally mixed particle operator") {
  const Matrix half = Matrix::Identity(2, 2) / 2.0;
  for (const char* name : {"E3", "E4", "E5", "E6"}) {
    const Ensemble e = built_in_ensemble(name, 12);
    CHECK(qtest::max_abs_diff(single_particle_operator(e).matrix(), half) < 1e-15);
  }

  const Ensemble weighted = IIDEnsemble({{0.3, ket0()}, {0.7, ket1()}});
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 0.3;
  expected(1, 1) = 0.7;
  CHECK(qtest::max_abs_diff(single_particle_operator(weighted).matrix(), expected) <
        1e-15);
}

TEST_CASE("sequence windows mix the pattern over all phase offsets") {
  const Ensemble e3 = built_in_ensemble("E3");
  const Matrix w3 = window_operator(e3, 3).matrix();
  const Matrix expected3 = 0.5 * (projector(ket("101")) + projector(ket("010")));
  CHECK(qtest::max_abs_diff(w3, expected3) < 1e-15);

  const Ensemble e4 = built_in_ensemble("E4");
  const Matrix w4 = window_operator(e4, 2).matrix();
  const Matrix expected4 =
      0.5 * (projector(tensor(ket_plus(), ket_minus())) +
             projector(tensor(ket_minus(), ket_plus())));
  CHECK(qtest::max_abs_diff(w4, expected4) < 1e-15);

  const Ensemble skewed = SequenceEnsemble({ket0(), ket0(), ket1()});
  const Matrix w = window_operator(skewed, 2).matrix();
  const Matrix expected =
      (projector(ket("00")) + projector(ket("01")) + projector(ket("10"))) / 3.0;
  CHECK(qtest::max_abs_diff(w, expected) < 1e-15);
}

TEST_CASE("iid windows are tensor powers of the particle operator") {
  const Ensemble uniform = IIDEnsemble({{0.5, ket0()}, {0.5, ket1()}});
  CHECK(qtest::max_abs_diff(window_operator(uniform, 3).matrix(),
                            Matrix::Identity(8, 8) / 8.0) < 1e-15);

  const Ensemble weighted = IIDEnsemble({{0.3, ket0()}, {0.7, ket_plus()}});
  const Matrix rho1 = single_particle_operator(weighted).matrix();
  CHECK(qtest::max_abs_diff(window_operator(weighted, 2).matrix(),
                            qtest::kron(rho1, rho1)) < 1e-15);
  CHECK(window_operator(weighted, 2).layout() == qubits(2));
}

TEST_CASE("iid ensembles with one particle operator share every window") {
  const Ensemble zmix = IIDEnsemble({{0.5, ket0()}, {0.5, ket1()}});
  const Ensemble xmix = IIDEnsemble({{0.5, ket_plus()}, {0.5, ket_minus()}});
  const Ensemble four_point = IIDEnsemble(
      {{0.25, ket0()}, {0.25, ket1()}, {0.25, ket_plus()}, {0.25, ket_minus()}});

  for (int m = 1; m <= 4; ++m) {
    const DensityOperator wz = window_operator(zmix, m);
    const DensityOperator wx = window_operator(xmix, m);
    const DensityOperator wf = window_operator(four_point, m);
    CHECK(trace_distance(wz, wx) < 1e-12);
    CHECK(trace_distance(wz, wf) < 1e-12);
  }
}

TEST_CASE("finite windows match the arrangement-enumeration oracle") {
  const std::vector<std::pair<PureState, int>> e5_counts = {{ket0(), 2}, {ket1(), 2}};
  const Ensemble e5 = FiniteCompositionEnsemble(4, e5_counts);
  for (int m : {1, 2, 4}) {
    CHECK(qtest::max_abs_diff(window_operator(e5, m).matrix(),
                              enumerated_finite_window(e5_counts, m)) < 1e-13);
  }

  const std::vector<std::pair<PureState, int>> e6_counts = {{ket_plus(), 2},
                                                            {ket_minus(), 2}};
  const Ensemble e6 = FiniteCompositionEnsemble(4, e6_counts);
  CHECK(qtest::max_abs_diff(window_operator(e6, 3).matrix(),
                            enumerated_finite_window(e6_counts, 3)) < 1e-13);

  const std::vector<std::pair<PureState, int>> skew_counts = {{ket0(), 1},
                                                              {ket_plus(), 2}};
  const Ensemble skew = FiniteCompositionEnsemble(3, skew_counts);
  for (int m : {2, 3}) {
    CHECK(qtest::max_abs_diff(window_operator(skew, m).matrix(),
                              enumerated_finite_window(skew_counts, m)) < 1e-13);
  }
}

TEST_CASE("every window position marginalizes to the particle operator") {
  const std::vector<Ensemble> ensembles = {
      built_in_ensemble("E3"),
      built_in_ensemble("E4"),
      built_in_ensemble("E5", 6),
      IIDEnsemble({{0.3, ket0()}, {0.7, ket_plus()}}),
  };
  for (const Ensemble& e : ensembles) {
    const Matrix rho1 = single_particle_operator(e).matrix();
    for (int m = 2; m <= 4; ++m) {
      const DensityOperator w = window_operator(e, m);
      CHECK(is_density_operator(w.matrix()).ok);
      for (int i = 0; i < m; ++i) {
        CHECK(qtest::max_abs_diff(partial_trace(w, {i}).matrix(), rho1) < 1e-13);
      }
    }
  }
}

TEST_CASE("equal marginals still leave correlated windows distinguishable") {
  const Ensemble e3 = built_in_ensemble("E3");
  const Ensemble e4 = built_in_ensemble("E4");

  CHECK(trace_distance(single_particle_operator(e3), single_particle_operator(e4)) <
        1e-15);

  const double gap = trace_distance(window_operator(e3, 2), window_operator(e4, 2));
  CHECK(std::abs(gap - 0.5) < 1e-12);
}

TEST_CASE("alternating z states obey the parity law of the squared spin sum") {
  const Ensemble e3 = built_in_ensemble("E3");
  const Ensemble e4 = built_in_ensemble("E4");
  for (int m = 1; m <= 8; ++m) {
    const SigmaZMoments z = sigma_z_moment_table(e3, m);
    CHECK(std::abs(z.mean) < 1e-12);
    const double parity = (m % 2 == 1) ? 1.0 : 0.0;
    CHECK(std::abs(z.second_moment - parity) < 1e-10);

    const SigmaZMoments x = sigma_z_moment_table(e4, m);
    CHECK(std::abs(x.mean) < 1e-12);
    CHECK(std::abs(x.second_moment - static_cast<double>(m)) < 1e-10);
  }
}

TEST_CASE("moment tables reproduce the worked window values") {
  const Ensemble e3 = built_in_ensemble("E3");
  const Ensemble e4 = built_in_ensemble("E4");

  const struct {
    const Ensemble* e;
    int m;
    double second;
  } cases[] = {
      {&e3, 2, 0.0}, {&e4, 2, 2.0}, {&e3, 3, 1.0},
      {&e4, 3, 3.0}, {&e3, 5, 1.0}, {&e4, 5, 5.0},
  };
  for (const auto& c : cases) {
    const SigmaZMoments moments = sigma_z_moment_table(*c.e, c.m);
    CHECK(std::abs(moments.mean) < 1e-12);
    CHECK(std::abs(moments.second_moment - c.second) < 1e-10);
  }

  // Drawing without replacement anticorrelates equal-z pairs: for two draws
  // from a run of two up and two down, <(z1+z2)^2> = 2 + 2*(-1/3).
  const Ensemble e5 = built_in_ensemble("E5", 4);
  CHECK(std::abs(sigma_z_moment_table(e5, 2).second_moment - 4.0 / 3.0) < 1e-12);
  CHECK(std::abs(sigma_z_moment_table(e5, 4).second_moment) < 1e-12);

  const Ensemble e6 = built_in_ensemble("E6", 4);
  CHECK(std::abs(sigma_z_moment_table(e6, 2).second_moment - 2.0) < 1e-12);
}

TEST_CASE("window guards reject out-of-range requests") {
  const Ensemble e3 = built_in_ensemble("E3");
  CHECK_THROWS_AS(window_operator(e3, 0), std::invalid_argument);
  CHECK_THROWS_AS(window_operator(e3, 13), std::invalid_argument);

  const Ensemble e5_large = built_in_ensemble("E5", 14);
  CHECK_THROWS_AS(window_operator(e5_large, 2), std::invalid_argument);

  const Ensemble e5 = built_in_ensemble("E5", 4);
  CHECK_THROWS_AS(window_operator(e5, 5), std::invalid_argument);
}

TEST_CASE("sequence samples are a coherent pattern with a random phase") {
  const Ensemble e3 = built_in_ensemble("E3");
  int offset_zero = 0;
  const int trials = 2000;
  for (int seed = 0; seed < trials; ++seed) {
    const std::vector<PureState> run =
        sample(e3, 4, static_cast<std::uint64_t>(seed));
    REQUIRE(run.size() == 4);
    if (is_state(run[0], ket1())) {
      ++offset_zero;
      CHECK(is_state(run[1], ket0()));
      CHECK(is_state(run[2], ket1()));
      CHECK(is_state(run[3], ket0()));
    } else {
      CHECK(is_state(run[0], ket0()));
      CHECK(is_state(run[1], ket1()));
      CHECK(is_state(run[2], ket0()));
      CHECK(is_state(run[3], ket1()));
    }
  }
  const double freq = static_cast<double>(offset_zero) / trials;
  const double se = std::sqrt(0.25 / trials);
  CHECK(std::abs(freq - 0.5) < 4.0 * se);
}

TEST_CASE("finite runs always contain their exact composition") {
  const Ensemble e5 = built_in_ensemble("E5", 4);
  for (int seed = 0; seed < 200; ++seed) {
    const std::vector<PureState> run =
        sample(e5, 4, static_cast<std::uint64_t>(seed));
    int zeros = 0;
    for (const auto& psi : run) {
      if (is_state(psi, ket0())) ++zeros;
    }
    CHECK(zeros == 2);
  }

  CHECK_THROWS_AS(sample(e5, 3, 0), std::invalid_argument);
  CHECK_THROWS_AS(sample(e5, 0, 0), std::invalid_argument);
}

TEST_CASE("iid samples converge to the member weights") {
  const Ensemble weighted = IIDEnsemble({{0.3, ket0()}, {0.7, ket1()}});
  const std::vector<PureState> run = sample(weighted, 4000, 9);
  int zeros = 0;
  for (const auto& psi : run) {
    if (is_state(psi, ket0())) ++zeros;
  }
  const double freq = zeros / 4000.0;
  const double se = std::sqrt(0.3 * 0.7 / 4000.0);
  CHECK(std::abs(freq - 0.3) < 4.0 * se);
}

TEST_CASE("sampling is deterministic per seed") {
  const Ensemble e4 = built_in_ensemble("E4");
  const std::vector<PureState> first = sample(e4, 6, 1234);
  const std::vector<PureState> second = sample(e4, 6, 1234);
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK((first[i].amplitudes() - second[i].amplitudes()).norm() == 0.0);
  }
  for (std::size_t i = 0; i + 1 < first.size(); ++i) {
    CHECK(std::abs(first[i].overlap(first[i + 1])) < 1e-12);
  }
}

TEST_CASE("state tables expose the emitted species in declaration order") {
  const Ensemble weighted = IIDEnsemble({{0.3, ket0()}, {0.7, ket_plus()}});
  const std::vector<PureState> iid_table = state_table(weighted);
  REQUIRE(iid_table.size() == 2);
  CHECK(is_state(iid_table[0], ket0()));
  CHECK(is_state(iid_table[1], ket_plus()));

  const std::vector<PureState> seq_table = state_table(built_in_ensemble("E3"));
  REQUIRE(seq_table.size() == 2);
  CHECK(is_state(seq_table[0], ket1()));

  const std::vector<PureState> fin_table = state_table(built_in_ensemble("E6", 4));
  REQUIRE(fin_table.size() == 2);
  CHECK(is_state(fin_table[0], ket_plus()));
  CHECK(is_state(fin_table[1], ket_minus()));
}

TEST_CASE("built-in ensemble lookup validates names and run lengths") {
  CHECK(is_built_in_ensemble("E3"));
  CHECK(is_built_in_ensemble("E6"));
  CHECK_FALSE(is_built_in_ensemble("E7"));
  CHECK_FALSE(is_built_in_ensemble("e3"));

  CHECK_THROWS_AS(built_in_ensemble("E7"), std::invalid_argument);
  CHECK_THROWS_AS(built_in_ensemble("E5", 3), std::invalid_argument);
  CHECK_THROWS_AS(built_in_ensemble("E6", 0), std::invalid_argument);
}
