// Acceptance checks, one line of output per criterion. Everything here is
// pinned: seeds, tolerances, and expected values are frozen alongside the
// fixtures under tests/data.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "polya/general_space.hpp"
#include "polya/inference.hpp"
#include "polya/model_io.hpp"
#include "polya/partition.hpp"
#include "polya/process.hpp"
#include "polya/verify.hpp"

using namespace polya;

#ifndef POLYA_TEST_DATA
#define POLYA_TEST_DATA "tests/data"
#endif

namespace {

struct Criterion {
  std::string name;
  std::function<void()> body;
  double time_limit_s = 0.0;  // 0 means no limit
};

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

std::string data(const std::string& name) { return std::string(POLYA_TEST_DATA) + "/" + name; }

Measure<Rat> base_for(std::size_t k) {
  // normalized (1, 2, ..., k) except the committed 3-state base
  auto space = StateSpace::indexed(k);
  if (k == 3) return Measure<Rat>(space, {Rat(1, 5), Rat(3, 10), Rat(1, 2)});
  std::vector<Rat> w;
  for (std::size_t j = 1; j <= k; ++j) w.emplace_back(j);
  return normalize(Measure<Rat>(space, std::move(w)));
}

// 1. Exact exchangeability across the partition grid.
void criterion_exchangeability() {
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto nu = base_for(k);
    for (const Rat& theta : {Rat(1, 2), Rat(1), Rat(2)}) {
      for (const auto& p : enumerate_partitions(nu.space())) {
        auto kern = conditional_kernel<Rat>(nu, p);
        auto fam = PredictiveFamily<Rat>::mvps(MvpsSpec<Rat>(theta, nu, kern));
        auto rep = check_exchangeable(fam, 5);
        require(rep.exchangeable, "violation at k=" + std::to_string(k) + " partition " +
                                      p.to_string() + " theta " + format_rational(theta));
        require(rep.max_length_checked == 5, "sweep stopped early");
      }
    }
  }
}

// 2. Forced coefficients: closed-form statements are recognized with the
// exact concentration; an off-form pair is rejected with a witness.
void criterion_forced_coefficients() {
  const auto nu = base_for(3);
  auto kern = conditional_kernel<Rat>(nu, Partition(nu.space(), {0, 1, 1}));
  for (const Rat& theta : {Rat(1, 2), Rat(1), Rat(2)}) {
    auto fam = PredictiveFamily<Rat>::sufficientness(
        nu, kern, CoefficientSequence<Rat>::closed_form(theta));
    auto result = characterize(fam, 4);
    require(result.verdict == CharacterizationVerdict::Mvps, "closed form not recognized");
    require(result.concentration_hat.has_value() && *result.concentration_hat == theta,
            "wrong concentration for theta " + format_rational(theta));
    for (const auto& row : result.coefficient_trace) {
      require(row.observed == row.forced, "trace mismatch");
    }
  }

  auto s2 = StateSpace::indexed(2);
  Measure<Rat> half(s2, {Rat(1, 2), Rat(1, 2)});
  auto bad = PredictiveFamily<Rat>::sufficientness(
      half, Kernel<Rat>::identity(s2),
      CoefficientSequence<Rat>::from_list({Rat(1, 3), Rat(1, 3)}));
  auto result = characterize(bad, 3);
  require(result.verdict == CharacterizationVerdict::NonExchangeable,
          "a1 = a2 = 1/3 slipped through");
  require(result.counterexample.has_value(), "no witness reported");
  require(result.counterexample->trajectory.values.size() <= 3, "witness too long");
  require(result.counterexample->p_original != result.counterexample->p_swapped,
          "witness does not witness");
}

// 3. Identity reinforcement reduces to the classic urn.
void criterion_dp_reduction() {
  auto s2 = StateSpace::indexed(2);
  Measure<Rat> uni(s2, {Rat(1, 2), Rat(1, 2)});
  auto dp = PredictiveFamily<Rat>::mvps(MvpsSpec<Rat>(Rat(1), uni, Kernel<Rat>::identity(s2)));
  auto p = dp.predictive(Trajectory(s2, {0}));
  require(p[0] == Rat(3, 4) && p[1] == Rat(1, 4), "worked value (3/4, 1/4) missed");

  for (std::size_t k = 2; k <= 3; ++k) {
    const auto nu = base_for(k);
    for (const Rat& theta : {Rat(1, 2), Rat(1), Rat(2)}) {
      auto fam = PredictiveFamily<Rat>::mvps(
          MvpsSpec<Rat>(theta, nu, Kernel<Rat>::identity(nu.space())));
      for (std::size_t len = 1; len <= 4; ++len) {
        for (const auto& w : oracles::all_words(k, len)) {
          require(fam.joint_probability(Trajectory(nu.space(), w)) ==
                      oracles::dp_joint(theta, nu.weights(), w),
                  "joint law differs from the counts oracle");
        }
      }
    }
  }

  for (const Rat& theta : {Rat(1, 2), Rat(1), Rat(2), Rat(5)}) {
    require(coefficient_defect(mvps_coefficient(theta, 1), mvps_coefficient(theta, 2)) == Rat(0),
            "closed form coefficients have nonzero defect");
  }
}

// 4. Detailed balance and the two step kernel identity, exactly.
void criterion_identities() {
  for (std::size_t k = 1; k <= 4; ++k) {
    const auto nu = base_for(k);
    for (const auto& p : enumerate_partitions(nu.space())) {
      auto kern = conditional_kernel<Rat>(nu, p);
      require(check_detailed_balance(nu, kern) == Rat(0),
              "detailed balance violated at k=" + std::to_string(k));
      require(check_kernel_identity(nu, kern, Rat(0)) == Rat(0),
              "kernel identity violated at k=" + std::to_string(k));
    }
  }

  auto s2 = StateSpace::indexed(2);
  Measure<Rat> half(s2, {Rat(1, 2), Rat(1, 2)});
  Kernel<Rat> bad(s2, {Measure<Rat>(s2, {Rat(1, 2), Rat(1, 2)}),
                       Measure<Rat>(s2, {Rat(0), Rat(1)})});
  // nu(x1) R_{x1}(x2) - nu(x2) R_{x2}(x1) = 1/4 - 0
  require(check_detailed_balance(half, bad) == Rat(1, 4),
          "documented violation is not exactly 1/4");
}

// 5. Enumeration sizes match the Bell numbers.
void criterion_bell() {
  const std::vector<Int> expected{Int(1), Int(2), Int(5), Int(15), Int(52)};
  for (std::size_t k = 1; k <= 5; ++k) {
    std::size_t count = 0;
    for_each_partition(k, [&](std::span<const std::size_t>) { ++count; });
    require(Int(count) == expected[k - 1], "enumeration size wrong at k=" + std::to_string(k));
    require(bell_number(static_cast<int>(k)) == expected[k - 1],
            "bell_number wrong at k=" + std::to_string(k));
  }
  require(bell_number(2) == Int(2) && bell_number(3) == Int(5) && bell_number(4) == Int(15),
          "reference values B2, B3, B4 missed");
}

// 6. Sufficientness detectors and the block predictive mass.
void criterion_sufficientness() {
  const auto nu = base_for(3);
  Partition p(nu.space(), {0, 1, 1});
  auto kern = conditional_kernel<Rat>(nu, p);
  auto fam = PredictiveFamily<Rat>::mvps(MvpsSpec<Rat>(Rat(2), nu, kern));

  require(check_johnson_sufficientness(fam, p, 6).holds, "johnson check failed");
  std::vector<Rat> w{Rat(2, 5), Rat(3, 5), Rat(1)};  // theta nu
  require(check_hill_sufficientness<Rat>(fam, w, p, 6).holds, "hill check failed");

  require(block_predictive_mass(fam, p, 1, 1, 1) == Rat(13, 15),
          "worked value g_{1,2}(1) = 13/15 missed");

  const std::vector<Rat> blockmass{Rat(1, 5), Rat(4, 5)};
  for (std::size_t n = 1; n <= 6; ++n) {
    for (std::size_t l = 0; l < 2; ++l) {
      for (std::size_t nl = 0; nl <= n; ++nl) {
        const Rat expect = (Rat(2) * blockmass[l] + Rat(nl)) / (Rat(2) + Rat(n));
        require(block_predictive_mass(fam, p, l, n, nl) == expect,
                "block mass differs at n=" + std::to_string(n) + " l=" + std::to_string(l) +
                    " n_l=" + std::to_string(nl));
      }
    }
  }
}

// 7. One block means i.i.d. draws from the base.
void criterion_iid_degenerate() {
  const auto nu = base_for(3);
  auto kern = conditional_kernel<Rat>(nu, Partition::trivial(nu.space()));
  auto fam = PredictiveFamily<Rat>::mvps(MvpsSpec<Rat>(Rat(2), nu, kern));
  require(check_iid_degenerate(fam, 5), "one block urn is not iid over length 5");
}

// 8. General space block law: exact normalization and both samplers close.
void criterion_general_laws() {
  GeneralMixtureModel m(
      Rat(1), {GeneralBin{{0.0, 1.0}, Rat(1, 2), PiecewiseLinearCdf::uniform({0.0, 1.0})},
               GeneralBin{{1.0, 2.0}, Rat(1, 2), PiecewiseLinearCdf::uniform({1.0, 2.0})}});

  Rat total(0);
  for (const auto& w : oracles::all_words(2, 3)) total += exact_block_law(m, w);
  require(total == Rat(1), "length 3 block law does not sum to 1");

  const std::size_t reps = 100000;
  auto rep = compare_laws(m, 3, reps, 20260818);
  const double band = 3.0 * std::sqrt(8.0 / static_cast<double>(reps));
  require(rep.tv_urn <= band, "urn empirical law outside the committed band");
  require(rep.tv_hierarchical <= band, "hierarchical empirical law outside the committed band");
}

// 9. Inference recovery on the committed fixtures.
void criterion_inference() {
  auto space = StateSpace::indexed(4);
  auto nu = Measure<Rat>::uniform(space);
  Partition truth(space, {0, 0, 1, 1});
  auto kern = conditional_kernel<Rat>(nu, truth);
  auto fam = PredictiveFamily<Rat>::mvps(MvpsSpec<Rat>(Rat(2), nu, kern));

  std::ifstream f(data("traj_mvps_k4_n2000.csv"));
  require(f.good(), "fixture traj_mvps_k4_n2000.csv missing");
  const auto fixture = read_trajectory_csv(f);
  require(fixture == fam.sample(2000, 9001).values,
          "fixture does not reproduce from the committed seed");

  auto fit = fit_model(space, fixture, std::vector<double>(4, 0.25));
  require(fit.best().partition == truth, "true partition not ranked first");
  require(fit.best().fit.status == ThetaFitStatus::Ok, "concentration fit not interior");
  require(fit.best().fit.concentration > 1.25 && fit.best().fit.concentration < 2.75,
          "concentration estimate outside the calibrated band");

  std::ifstream g(data("traj_iid_k3_n400.csv"));
  require(g.good(), "fixture traj_iid_k3_n400.csv missing");
  const auto iid = read_trajectory_csv(g);
  auto ifit = fit_model(StateSpace::indexed(3), iid, std::nullopt);
  require(ifit.best().partition == Partition::trivial(StateSpace::indexed(3)),
          "one block model not preferred on iid data");
  require(ifit.best().fit.status == ThetaFitStatus::Flat, "iid data did not flatten theta");
}

// 10. Byte identical output for every randomized command at a fixed seed.
void criterion_determinism() {
  const char* cli = std::getenv("POLYA_CLI");
  require(cli != nullptr, "POLYA_CLI not set");

  const auto dir = std::filesystem::temp_directory_path() /
                   ("polya_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);

  const auto capture = [&](const std::string& args, const std::string& tag) {
    const auto out = dir / (tag + ".out");
    const std::string cmd = std::string(cli) + " " + args + " > " + out.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    require(WIFEXITED(rc) && WEXITSTATUS(rc) == 0, "command failed: " + args);
    std::ifstream in(out);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  const std::string sim =
      "simulate --model " + data("model_partition_k3.json") + " --n 200 --seed 31";
  require(capture(sim, "sim_a") == capture(sim, "sim_b"), "simulate output not reproducible");

  const std::string cmp = "compare-laws --model " + data("model_general_2bin.json") +
                          " --prefix 2 --reps 3000 --seed 31";
  require(capture(cmp, "cmp_a") == capture(cmp, "cmp_b"), "compare-laws output not reproducible");

  const std::string gsim =
      "simulate --model " + data("model_general_2bin.json") + " --n 50 --seed 31";
  require(capture(gsim, "gsim_a") == capture(gsim, "gsim_b"),
          "general simulate output not reproducible");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"exchangeability of the partition grid", criterion_exchangeability, 10.0},
      {"forced coefficient recognition", criterion_forced_coefficients, 0.0},
      {"classic urn reduction", criterion_dp_reduction, 0.0},
      {"detailed balance and kernel identity", criterion_identities, 0.0},
      {"bell counts", criterion_bell, 0.0},
      {"sufficientness detectors and block mass", criterion_sufficientness, 0.0},
      {"one block degeneracy", criterion_iid_degenerate, 0.0},
      {"general space law equivalence", criterion_general_laws, 30.0},
      {"inference recovery", criterion_inference, 0.0},
      {"seeded determinism", criterion_determinism, 0.0},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    std::string why;
    try {
      c.body();
    } catch (const std::exception& e) {
      why = e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (why.empty() && c.time_limit_s > 0.0 && elapsed > c.time_limit_s) {
      why = "exceeded " + std::to_string(c.time_limit_s) + "s";
    }
    if (why.empty()) {
      std::printf("[PASS] %zu. %s (%.2fs)\n", i + 1, c.name.c_str(), elapsed);
    } else {
      ++failures;
      std::printf("[FAIL] %zu. %s: %s\n", i + 1, c.name.c_str(), why.c_str());
    }
  }
  return failures == 0 ? 0 : 1;
}
