#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "polya/error.hpp"
#include "polya/general_space.hpp"
#include "polya/inference.hpp"
#include "polya/model_io.hpp"
#include "polya/partition.hpp"
#include "polya/process.hpp"
#include "polya/verify.hpp"

namespace {

using nlohmann::json;
using namespace polya;

void emit(const json& j, bool pretty) {
  if (pretty) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << j.dump() << "\n";
  }
}

template <class S>
json num(const S& v) {
  if constexpr (scalar_traits<S>::exact) {
    return format_rational(v);
  } else {
    return v;
  }
}

std::uint64_t default_seed() {
  const char* env = std::getenv("POLYA_SEED");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0') {
    throw ValidationError(std::string("POLYA_SEED is not an unsigned integer: '") + env + "'");
  }
  return v;
}

json partition_blocks_json(const Partition& p) {
  json blocks = json::array();
  for (const auto& block : p.members()) {
    blocks.push_back(block);
  }
  return blocks;
}

template <class S>
json trajectory_json(const Trajectory& t) {
  json out;
  out["states"] = t.values;
  json labels = json::array();
  for (std::size_t x : t.values) labels.push_back(t.space->label(x));
  out["labels"] = std::move(labels);
  return out;
}

template <class S>
json swap_counterexample_json(const SwapCounterexample<S>& c) {
  json out = trajectory_json<S>(c.trajectory);
  out["position"] = c.position;
  out["p_original"] = num(c.p_original);
  out["p_swapped"] = num(c.p_swapped);
  return out;
}

template <class S>
json sufficientness_counterexample_json(const StateSpacePtr& space,
                                        const SufficientnessCounterexample<S>& c) {
  json out;
  out["state"] = c.state;
  out["state_label"] = space->label(c.state);
  out["history_a"] = c.history_a.values;
  out["history_b"] = c.history_b.values;
  out["mass_a"] = num(c.mass_a);
  out["mass_b"] = num(c.mass_b);
  return out;
}

struct VerifyOptions {
  std::string suite;
  std::size_t max_len = 5;
  std::optional<std::string> weights;  // comma-separated, hill only
  bool pretty = false;
};

template <class S>
std::vector<S> parse_weight_list(const std::string& csv, std::size_t expected) {
  std::vector<S> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if constexpr (scalar_traits<S>::exact) {
      out.push_back(parse_rational(item));
    } else {
      try {
        out.push_back(to_double(parse_rational(item)));
      } catch (const ParseError&) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
          v = std::stod(item, &pos);
        } catch (const std::exception&) {
          throw ParseError("bad weight '" + item + "'");
        }
        if (pos != item.size()) throw ParseError("bad weight '" + item + "'");
        out.push_back(v);
      }
    }
  }
  if (out.size() != expected) {
    throw ValidationError("expected " + std::to_string(expected) + " weights, got " +
                          std::to_string(out.size()));
  }
  return out;
}

// Default state weighting for the hill suite: concentration times the base
// measure when a concentration is available, the base measure alone otherwise.
template <class S>
std::vector<S> default_hill_weights(const PredictiveFamily<S>& family) {
  std::vector<S> w = family.base_measure().weights();
  std::optional<S> scale;
  if (family.concentration()) {
    scale = *family.concentration();
  } else if (family.coefficients() && family.coefficients()->is_closed_form()) {
    scale = *family.coefficients()->concentration();
  } else if (family.coefficients()) {
    const S a1 = family.coefficients()->at(1);
    scale = S(1) / a1 - S(1);
  }
  if (scale) {
    for (S& v : w) v = v * *scale;
  }
  return w;
}

template <class S>
int run_verify(const FiniteModel& model, const PredictiveFamily<S>& family,
               const VerifyOptions& opt) {
  const double tol = model.tol;
  json out;
  out["suite"] = opt.suite;
  out["mode"] = model.mode == ScalarMode::Exact ? "exact" : "float";

  if (opt.suite == "exchangeability") {
    const auto report = check_exchangeable(family, opt.max_len, tol);
    out["max_len"] = opt.max_len;
    out["exchangeable"] = report.exchangeable;
    out["max_length_checked"] = report.max_length_checked;
    if (report.counterexample) {
      out["counterexample"] = swap_counterexample_json<S>(*report.counterexample);
    }
    emit(out, opt.pretty);
    return report.exchangeable ? 0 : 1;
  }

  if (opt.suite == "identities") {
    if (!family.has_reinforcement()) {
      throw ValidationError("identities suite requires a reinforcement kernel");
    }
    S a1(0), a2(0);
    if (family.concentration()) {
      a1 = mvps_coefficient(*family.concentration(), 1);
      a2 = mvps_coefficient(*family.concentration(), 2);
    } else if (family.coefficients()) {
      a1 = family.coefficients()->at(1);
      a2 = family.coefficients()->at(2);
    } else {
      throw ValidationError("identities suite needs a_1 and a_2; the model has no coefficients");
    }
    const S defect = coefficient_defect(a1, a2);
    const S balance = check_detailed_balance(family.base_measure(), family.reinforcement(), tol);
    const S identity =
        check_kernel_identity(family.base_measure(), family.reinforcement(), defect, tol);
    const bool pass = scalar_traits<S>::eq(balance, S(0), tol) &&
                      scalar_traits<S>::eq(identity, S(0), tol);
    out["a1"] = num(a1);
    out["a2"] = num(a2);
    out["defect"] = num(defect);
    out["detailed_balance_max_violation"] = num(balance);
    out["kernel_identity_max_violation"] = num(identity);
    out["pass"] = pass;
    emit(out, opt.pretty);
    return pass ? 0 : 1;
  }

  if (opt.suite == "johnson" || opt.suite == "hill") {
    if (!model.partition) {
      throw ValidationError(
          "the model kernel does not define a partition; state it with kernel type 'partition'");
    }
    const Partition& p = *model.partition;
    out["max_len"] = opt.max_len;
    out["partition"] = partition_blocks_json(p);
    SufficientnessReport<S> report;
    if (opt.suite == "johnson") {
      report = check_johnson_sufficientness(family, p, opt.max_len, tol);
    } else {
      std::vector<S> w = opt.weights ? parse_weight_list<S>(*opt.weights, family.space()->size())
                                     : default_hill_weights(family);
      json jw = json::array();
      for (const S& v : w) jw.push_back(num(v));
      out["weights"] = std::move(jw);
      report = check_hill_sufficientness<S>(family, w, p, opt.max_len, tol);
    }
    out["holds"] = report.holds;
    out["max_length_checked"] = report.max_length_checked;
    if (report.counterexample) {
      out["counterexample"] =
          sufficientness_counterexample_json<S>(family.space(), *report.counterexample);
    }
    emit(out, opt.pretty);
    return report.holds ? 0 : 1;
  }

  if (opt.suite == "characterize") {
    const auto result = characterize(family, opt.max_len, tol);
    out["max_len"] = opt.max_len;
    switch (result.verdict) {
      case CharacterizationVerdict::Mvps:
        out["verdict"] = "mvps";
        break;
      case CharacterizationVerdict::NonExchangeable:
        out["verdict"] = "non_exchangeable";
        break;
      case CharacterizationVerdict::NotSufficientnessForm:
        out["verdict"] = "not_sufficientness_form";
        break;
    }
    out["iid_degenerate"] = result.iid_degenerate;
    if (result.concentration_hat) {
      out["concentration_hat"] = num(*result.concentration_hat);
    }
    if (!result.coefficient_trace.empty()) {
      json trace = json::array();
      for (const auto& row : result.coefficient_trace) {
        trace.push_back(
            {{"n", row.n}, {"observed", num(row.observed)}, {"forced", num(row.forced)}});
      }
      out["coefficient_trace"] = std::move(trace);
    }
    if (result.counterexample) {
      out["counterexample"] = swap_counterexample_json<S>(*result.counterexample);
    }
    emit(out, opt.pretty);
    return result.verdict == CharacterizationVerdict::Mvps ? 0 : 1;
  }

  throw ValidationError("unknown suite '" + opt.suite +
                        "'; pick exchangeability, identities, johnson, hill, or characterize");
}

int cmd_simulate(const std::string& model_path, std::size_t n, std::uint64_t seed,
                 const std::optional<std::string>& out_path) {
  const ParsedModel parsed = load_model(model_path);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (out_path) {
    file.open(*out_path);
    if (!file) throw Error("cannot open output file '" + *out_path + "'");
    out = &file;
  }
  if (std::holds_alternative<FiniteModel>(parsed)) {
    const FiniteModel& model = std::get<FiniteModel>(parsed);
    if (model.mode == ScalarMode::Exact) {
      write_trajectory_csv(*out, model.exact->sample(n, seed));
    } else {
      std::cerr << "note: decimal values in the model; sampling in float mode\n";
      write_trajectory_csv(*out, model.approx->sample(n, seed));
    }
  } else {
    const GeneralModelFile& model = std::get<GeneralModelFile>(parsed);
    write_real_trajectory_csv(*out, sample_urn(model.model, n, seed));
  }
  return 0;
}

int cmd_verify(const std::string& model_path, const VerifyOptions& opt) {
  const ParsedModel parsed = load_model(model_path);
  if (!std::holds_alternative<FiniteModel>(parsed)) {
    throw ValidationError("verify expects a finite model");
  }
  const FiniteModel& model = std::get<FiniteModel>(parsed);
  if (model.mode == ScalarMode::Exact) {
    return run_verify<Rat>(model, *model.exact, opt);
  }
  std::cerr << "note: decimal values in the model; verifying in float mode (tol=" << model.tol
            << ")\n";
  return run_verify<double>(model, *model.approx, opt);
}

int cmd_enumerate(int k) {
  if (k < 1 || k > 12) throw OutOfRangeError("enumerate: k must lie in [1, 12]");
  for_each_partition(static_cast<std::size_t>(k), [](std::span<const std::size_t> a) {
    std::string line;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i) line += ' ';
      line += std::to_string(a[i]);
    }
    std::cout << line << '\n';
  });
  return 0;
}

int cmd_bell(int k) {
  std::cout << bell_number(k).str() << "\n";
  return 0;
}

std::vector<double> read_nu_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  const json* arr = nullptr;
  if (j.is_array()) {
    arr = &j;
  } else if (j.is_object() && j.contains("nu")) {
    arr = &j["nu"];
  } else {
    throw ParseError(path + ": expected a JSON array or an object with a 'nu' field");
  }
  std::vector<double> out;
  for (const auto& v : *arr) {
    if (v.is_string()) {
      out.push_back(to_double(parse_rational(v.get<std::string>())));
    } else if (v.is_number()) {
      out.push_back(v.get<double>());
    } else {
      throw ParseError(path + ": 'nu' entries must be numbers or \"p/q\" strings");
    }
  }
  return out;
}

const char* fit_status_name(ThetaFitStatus s) {
  switch (s) {
    case ThetaFitStatus::Ok:
      return "ok";
    case ThetaFitStatus::Flat:
      return "flat";
    case ThetaFitStatus::EdgeMaximum:
      return "edge_maximum";
  }
  return "?";
}

json partition_fit_json(const PartitionFit& pf) {
  json out;
  out["assignment"] = pf.partition.assignment();
  out["blocks"] = partition_blocks_json(pf.partition);
  out["num_blocks"] = pf.partition.num_blocks();
  out["status"] = fit_status_name(pf.fit.status);
  if (std::isnan(pf.fit.concentration)) {
    out["concentration_hat"] = nullptr;
  } else {
    out["concentration_hat"] = pf.fit.concentration;
  }
  out["log_likelihood"] = pf.fit.log_likelihood;
  return out;
}

int cmd_fit(const std::string& traj_path, const std::optional<std::string>& nu_path,
            bool estimate_nu, std::optional<std::size_t> k_opt, bool pretty) {
  std::ifstream in(traj_path);
  if (!in) throw ParseError(traj_path + ": cannot open");
  std::vector<std::size_t> traj;
  try {
    traj = read_trajectory_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(traj_path + ": " + e.what());
  }
  if (traj.empty()) throw OutOfRangeError("fit: the trajectory is empty");

  std::size_t max_state = 0;
  for (std::size_t x : traj) max_state = std::max(max_state, x);

  std::optional<std::vector<double>> nu;
  std::size_t k;
  if (nu_path) {
    nu = read_nu_file(*nu_path);
    k = nu->size();
  } else if (estimate_nu) {
    k = k_opt.value_or(max_state + 1);
  } else {
    throw ValidationError("fit: pass --nu FILE or --estimate-nu");
  }
  if (k_opt && *k_opt != k && nu_path) {
    throw ValidationError("fit: --k disagrees with the length of 'nu'");
  }
  if (max_state >= k) {
    throw ValidationError("fit: trajectory uses state " + std::to_string(max_state) +
                          " but k = " + std::to_string(k));
  }

  const auto space = StateSpace::indexed(k);
  const FitResult result = fit_model(space, traj, nu);

  json out;
  out["k"] = k;
  out["n"] = traj.size();
  out["base_weights"] = result.base_weights;
  out["base_estimated"] = result.base_estimated;
  out["best"] = partition_fit_json(result.best());
  json table = json::array();
  for (const auto& pf : result.table) table.push_back(partition_fit_json(pf));
  out["table"] = std::move(table);
  emit(out, pretty);
  return 0;
}

int cmd_compare_laws(const std::string& model_path, std::size_t prefix_len,
                     std::size_t replicates, std::uint64_t seed,
                     const std::optional<std::string>& csv_path, bool pretty) {
  const ParsedModel parsed = load_model(model_path);
  if (!std::holds_alternative<GeneralModelFile>(parsed)) {
    throw ValidationError("compare-laws expects a general model");
  }
  const GeneralMixtureModel& model = std::get<GeneralModelFile>(parsed).model;
  const CompareLawsReport report = compare_laws(model, prefix_len, replicates, seed);

  if (csv_path) {
    std::ofstream csv(*csv_path);
    if (!csv) throw Error("cannot open output file '" + *csv_path + "'");
    csv << "sequence,exact,urn,hierarchical\n";
    csv << std::setprecision(17);
    for (const auto& row : report.rows) {
      std::string seq;
      for (std::size_t i = 0; i < row.sequence.size(); ++i) {
        if (i) seq += '-';
        seq += std::to_string(row.sequence[i]);
      }
      csv << seq << ',' << to_double(row.exact) << ',' << row.urn_empirical << ','
          << row.hierarchical_empirical << '\n';
    }
  }

  json out;
  out["prefix_len"] = report.prefix_len;
  out["replicates"] = report.replicates;
  out["seed"] = seed;
  out["tv_urn"] = report.tv_urn;
  out["tv_hierarchical"] = report.tv_hierarchical;
  out["mc_error_bound"] = report.mc_error_bound;
  out["tail_mass"] = format_rational(model.tail_mass());
  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"sequence", row.sequence},
                    {"exact", format_rational(row.exact)},
                    {"exact_value", to_double(row.exact)},
                    {"urn", row.urn_empirical},
                    {"hierarchical", row.hierarchical_empirical}});
  }
  out["rows"] = std::move(rows);
  emit(out, pretty);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"measure-valued Polya urn processes: simulation, verification, fitting"};
  app.require_subcommand(1);

  std::string model_path;
  std::string traj_path;
  std::string suite;
  std::optional<std::string> out_path;
  std::optional<std::string> csv_path;
  std::optional<std::string> nu_path;
  std::optional<std::string> weights;
  std::size_t n = 0;
  std::size_t prefix_len = 3;
  std::size_t replicates = 10000;
  std::optional<std::uint64_t> seed_opt;
  std::size_t max_len = 5;
  std::optional<std::size_t> k_opt;
  int k_pos = 0;
  bool pretty = false;
  bool estimate_nu = false;

  auto* sim = app.add_subcommand("simulate", "Draw a trajectory from a model file (CSV out)");
  sim->add_option("--model", model_path, "model JSON file")->required();
  sim->add_option("--n", n, "number of draws")->required();
  sim->add_option("--seed", seed_opt, "RNG seed (default: POLYA_SEED or 0)");
  sim->add_option("--out", out_path, "output CSV path (default: stdout)");

  auto* ver = app.add_subcommand("verify", "Run a verification suite against a model file");
  ver->add_option("--model", model_path, "model JSON file")->required();
  ver->add_option("--suite", suite,
                  "exchangeability | identities | johnson | hill | characterize")
      ->required();
  ver->add_option("--max-len", max_len, "history/trajectory length bound (default 5)");
  ver->add_option("--weights", weights, "hill suite: comma-separated state weights");
  ver->add_flag("--pretty", pretty, "indent JSON output");

  auto* enu = app.add_subcommand("enumerate", "List canonical partition assignments of k states");
  enu->add_option("k", k_pos, "number of states (1..12)")->required();

  auto* bel = app.add_subcommand("bell", "Print the number of partitions of k states");
  bel->add_option("k", k_pos, "number of states (1..20)")->required();

  auto* fit = app.add_subcommand("fit", "Fit partition and concentration to a trajectory CSV");
  fit->add_option("--traj", traj_path, "trajectory CSV (step,state)")->required();
  fit->add_option("--nu", nu_path, "base weights JSON (array, or object with 'nu')");
  fit->add_flag("--estimate-nu", estimate_nu, "estimate base weights by add-one smoothing");
  fit->add_option("--k", k_opt, "state count (default: inferred)");
  fit->add_flag("--pretty", pretty, "indent JSON output");

  auto* cmp = app.add_subcommand("compare-laws",
                                 "Compare urn and hierarchical samplers against the exact block law");
  cmp->add_option("--model", model_path, "general model JSON file")->required();
  cmp->add_option("--prefix", prefix_len, "block-sequence length (1..4, default 3)");
  cmp->add_option("--reps", replicates, "Monte Carlo replicates (default 10000)");
  cmp->add_option("--seed", seed_opt, "RNG seed (default: POLYA_SEED or 0)");
  cmp->add_option("--out-csv", csv_path, "per-sequence CSV output path");
  cmp->add_flag("--pretty", pretty, "indent JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::uint64_t seed = seed_opt ? *seed_opt : default_seed();
    if (sim->parsed()) return cmd_simulate(model_path, n, seed, out_path);
    if (ver->parsed()) {
      VerifyOptions opt;
      opt.suite = suite;
      opt.max_len = max_len;
      opt.weights = weights;
      opt.pretty = pretty;
      return cmd_verify(model_path, opt);
    }
    if (enu->parsed()) return cmd_enumerate(k_pos);
    if (bel->parsed()) return cmd_bell(k_pos);
    if (fit->parsed()) return cmd_fit(traj_path, nu_path, estimate_nu, k_opt, pretty);
    if (cmp->parsed()) return cmd_compare_laws(model_path, prefix_len, replicates, seed,
                                               csv_path, pretty);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
