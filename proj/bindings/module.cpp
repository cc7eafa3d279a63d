#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "polya/error.hpp"
#include "polya/general_space.hpp"
#include "polya/inference.hpp"
#include "polya/measure.hpp"
#include "polya/partition.hpp"
#include "polya/process.hpp"
#include "polya/rational.hpp"
#include "polya/verify.hpp"

namespace py = pybind11;

namespace pybind11 {
namespace detail {

// polya::Rat <-> fractions.Fraction. Integers and Fractions load exactly;
// floats are refused so nothing silently rounds on the way in.
template <>
struct type_caster<polya::Rat> {
 public:
  PYBIND11_TYPE_CASTER(polya::Rat, const_name("Fraction"));

  bool load(handle src, bool) {
    if (!src || src.is_none()) return false;
    if (PyFloat_Check(src.ptr())) return false;
    if (PyLong_Check(src.ptr())) {
      const std::string s = py::str(src);
      value = polya::Rat(polya::Int(s));
      return true;
    }
    if (py::hasattr(src, "numerator") && py::hasattr(src, "denominator")) {
      const std::string n = py::str(src.attr("numerator"));
      const std::string d = py::str(src.attr("denominator"));
      if (polya::Int(d) == 0) return false;
      value = polya::Rat(polya::Int(n), polya::Int(d));
      return true;
    }
    return false;
  }

  static handle cast(const polya::Rat& src, return_value_policy, handle) {
    py::object fraction = py::module_::import("fractions").attr("Fraction");
    return fraction(py::str(polya::format_rational(src))).release();
  }
};

}  // namespace detail
}  // namespace pybind11

namespace {

using namespace polya;

using ExactMeasure = Measure<Rat>;
using ExactKernel = Kernel<Rat>;
using ExactFamily = PredictiveFamily<Rat>;

StateSpacePtr space_for(std::size_t k, const std::optional<std::vector<std::string>>& labels) {
  if (labels) {
    if (labels->size() != k) throw ValidationError("one label per state required");
    return StateSpace::make(*labels);
  }
  return StateSpace::indexed(k);
}

py::object py_int(const Int& v) {
  return py::module_::import("builtins").attr("int")(py::str(v.str()));
}

py::list trajectory_list(const Trajectory& t) {
  py::list out;
  for (std::size_t x : t.values) out.append(x);
  return out;
}

py::dict swap_counterexample_dict(const SwapCounterexample<Rat>& c) {
  py::dict d;
  d["trajectory"] = trajectory_list(c.trajectory);
  d["position"] = c.position;
  d["p_original"] = py::cast(c.p_original);
  d["p_swapped"] = py::cast(c.p_swapped);
  return d;
}

py::dict sufficientness_counterexample_dict(const SufficientnessCounterexample<Rat>& c) {
  py::dict d;
  d["state"] = c.state;
  d["history_a"] = trajectory_list(c.history_a);
  d["history_b"] = trajectory_list(c.history_b);
  d["mass_a"] = py::cast(c.mass_a);
  d["mass_b"] = py::cast(c.mass_b);
  return d;
}

py::dict theta_fit_dict(const ThetaFit& f) {
  py::dict d;
  switch (f.status) {
    case ThetaFitStatus::Ok:
      d["status"] = "ok";
      break;
    case ThetaFitStatus::Flat:
      d["status"] = "flat";
      break;
    case ThetaFitStatus::EdgeMaximum:
      d["status"] = "edge_maximum";
      break;
  }
  if (std::isnan(f.concentration)) {
    d["concentration"] = py::none();
  } else {
    d["concentration"] = f.concentration;
  }
  d["log_likelihood"] = f.log_likelihood;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "measure-valued Polya urn processes over finite state spaces";

  const auto err = py::register_exception<Error>(m, "Error");
  py::register_exception<ValidationError>(m, "ValidationError", err.ptr());
  py::register_exception<ParseError>(m, "ParseError", err.ptr());
  py::register_exception<OutOfRangeError>(m, "OutOfRangeError", err.ptr());

  py::class_<ExactMeasure>(m, "Measure")
      .def(py::init([](std::vector<Rat> weights, std::optional<std::vector<std::string>> labels) {
             auto space = space_for(weights.size(), labels);
             return ExactMeasure(std::move(space), std::move(weights));
           }),
           py::arg("weights"), py::arg("labels") = std::nullopt)
      .def_static("uniform",
                  [](std::size_t k, std::optional<std::vector<std::string>> labels) {
                    return ExactMeasure::uniform(space_for(k, labels));
                  },
                  py::arg("k"), py::arg("labels") = std::nullopt)
      .def_static("dirac",
                  [](std::size_t k, std::size_t state) {
                    return ExactMeasure::dirac(StateSpace::indexed(k), state);
                  },
                  py::arg("k"), py::arg("state"))
      .def_property_readonly("weights", [](const ExactMeasure& v) { return v.weights(); })
      .def_property_readonly("mass", [](const ExactMeasure& v) { return v.mass(); })
      .def_property_readonly("labels", [](const ExactMeasure& v) { return v.space()->labels(); })
      .def("mass_on", [](const ExactMeasure& v, std::vector<std::size_t> s) { return v.mass_on(s); })
      .def("is_probability", [](const ExactMeasure& v) { return v.is_probability(); })
      .def("strictly_positive", &ExactMeasure::strictly_positive)
      .def("__len__", &ExactMeasure::size)
      .def("__getitem__",
           [](const ExactMeasure& v, std::size_t j) {
             if (j >= v.size()) throw py::index_error();
             return v[j];
           })
      .def("__eq__", [](const ExactMeasure& a, const ExactMeasure& b) { return a.equals(b); })
      .def("__repr__", [](const ExactMeasure& v) {
        std::string s = "Measure([";
        for (std::size_t j = 0; j < v.size(); ++j) {
          if (j) s += ", ";
          s += format_rational(v[j]);
        }
        return s + "])";
      });

  py::class_<Partition>(m, "Partition")
      .def(py::init([](std::vector<std::size_t> assignment,
                       std::optional<std::vector<std::string>> labels) {
             auto space = space_for(assignment.size(), labels);
             return Partition(std::move(space), std::move(assignment));
           }),
           py::arg("assignment"), py::arg("labels") = std::nullopt)
      .def_static("trivial", [](std::size_t k) { return Partition::trivial(StateSpace::indexed(k)); })
      .def_static("discrete",
                  [](std::size_t k) { return Partition::discrete(StateSpace::indexed(k)); })
      .def_property_readonly("assignment", &Partition::assignment)
      .def_property_readonly("blocks", &Partition::members)
      .def_property_readonly("num_blocks", &Partition::num_blocks)
      .def("block_of", &Partition::block_of, py::arg("state"))
      .def("__len__", &Partition::size)
      .def("__eq__", [](const Partition& a, const Partition& b) { return a == b; })
      .def("__repr__", [](const Partition& p) { return "Partition(" + p.to_string() + ")"; });

  py::class_<ExactKernel>(m, "Kernel")
      .def(py::init([](std::vector<std::vector<Rat>> rows,
                       std::optional<std::vector<std::string>> labels) {
             auto space = space_for(rows.size(), labels);
             std::vector<ExactMeasure> measures;
             measures.reserve(rows.size());
             for (auto& row : rows) measures.emplace_back(space, std::move(row));
             return ExactKernel(std::move(space), std::move(measures));
           }),
           py::arg("rows"), py::arg("labels") = std::nullopt)
      .def_static("identity",
                  [](std::size_t k) { return ExactKernel::identity(StateSpace::indexed(k)); })
      .def_static("constant", [](const ExactMeasure& row) { return ExactKernel::constant(row); })
      .def("row", &ExactKernel::row, py::arg("state"))
      .def_property_readonly("rows",
                             [](const ExactKernel& kern) {
                               std::vector<std::vector<Rat>> out;
                               for (std::size_t x = 0; x < kern.size(); ++x) {
                                 out.push_back(kern.row(x).weights());
                               }
                               return out;
                             })
      .def("is_probability_kernel", [](const ExactKernel& kern) { return kern.is_probability_kernel(); })
      .def("__len__", &ExactKernel::size)
      .def("__eq__", [](const ExactKernel& a, const ExactKernel& b) { return a.equals(b); });

  m.def("normalize", [](const ExactMeasure& v) { return normalize(v); }, py::arg("measure"));
  m.def("condition",
        [](const ExactMeasure& nu, std::vector<std::size_t> states) {
          return condition<Rat>(nu, states);
        },
        py::arg("measure"), py::arg("states"));
  m.def("mix",
        [](const Rat& a, const ExactMeasure& p, const ExactMeasure& q) { return mix(a, p, q); },
        py::arg("a"), py::arg("p"), py::arg("q"));
  m.def("kernel_apply",
        [](const ExactKernel& k, const ExactMeasure& mu) { return kernel_apply(k, mu); },
        py::arg("kernel"), py::arg("measure"));
  m.def("total_variation",
        [](const ExactMeasure& p, const ExactMeasure& q) { return total_variation(p, q); },
        py::arg("p"), py::arg("q"));

  m.def("bell_number", [](int k) { return py_int(bell_number(k)); }, py::arg("k"));
  m.def("enumerate_partitions",
        [](std::size_t k) {
          std::vector<std::vector<std::size_t>> out;
          for_each_partition(k, [&](std::span<const std::size_t> a) {
            out.emplace_back(a.begin(), a.end());
          });
          return out;
        },
        py::arg("k"));
  m.def("conditional_kernel",
        [](const ExactMeasure& nu, const Partition& p) { return conditional_kernel<Rat>(nu, p); },
        py::arg("measure"), py::arg("partition"));
  m.def("recover_partition",
        [](const ExactMeasure& nu, const ExactKernel& k) { return recover_partition<Rat>(nu, k); },
        py::arg("measure"), py::arg("kernel"));

  py::class_<ExactFamily>(m, "PredictiveFamily")
      .def_static("mvps",
                  [](const Rat& concentration, const ExactMeasure& base, const ExactKernel& r) {
                    return ExactFamily::mvps(MvpsSpec<Rat>(concentration, base, r));
                  },
                  py::arg("concentration"), py::arg("base"), py::arg("reinforcement"))
      .def_static("sufficientness",
                  [](const ExactMeasure& base, const ExactKernel& r, std::vector<Rat> coeffs) {
                    return ExactFamily::sufficientness(
                        base, r, CoefficientSequence<Rat>::from_list(std::move(coeffs)));
                  },
                  py::arg("base"), py::arg("reinforcement"), py::arg("coefficients"))
      .def_static("sufficientness_closed_form",
                  [](const ExactMeasure& base, const ExactKernel& r, const Rat& concentration) {
                    return ExactFamily::sufficientness(
                        base, r, CoefficientSequence<Rat>::closed_form(concentration));
                  },
                  py::arg("base"), py::arg("reinforcement"), py::arg("concentration"))
      .def_static("iid", [](const ExactMeasure& base) { return ExactFamily::iid(base); },
                  py::arg("base"))
      .def_property_readonly("kind",
                             [](const ExactFamily& f) {
                               switch (f.kind()) {
                                 case ExactFamily::Kind::Mvps:
                                   return "mvps";
                                 case ExactFamily::Kind::Sufficientness:
                                   return "sufficientness";
                                 case ExactFamily::Kind::Iid:
                                   return "iid";
                               }
                               return "?";
                             })
      .def_property_readonly("base_measure", &ExactFamily::base_measure)
      .def_property_readonly("concentration",
                             [](const ExactFamily& f) -> std::optional<Rat> {
                               return f.concentration();
                             })
      .def_property_readonly("reinforcement",
                             [](const ExactFamily& f) -> std::optional<ExactKernel> {
                               if (!f.has_reinforcement()) return std::nullopt;
                               return f.reinforcement();
                             })
      .def("predictive",
           [](const ExactFamily& f, std::vector<std::size_t> history) {
             return f.predictive(Trajectory(f.space(), std::move(history)));
           },
           py::arg("history"))
      .def("joint_probability",
           [](const ExactFamily& f, std::vector<std::size_t> values) {
             return f.joint_probability(Trajectory(f.space(), std::move(values)));
           },
           py::arg("trajectory"))
      .def("sample",
           [](const ExactFamily& f, std::size_t n, std::uint64_t seed) {
             return trajectory_list(f.sample(n, seed));
           },
           py::arg("n"), py::arg("seed"));

  m.def("mvps_coefficient",
        [](const Rat& concentration, std::size_t n) { return mvps_coefficient(concentration, n); },
        py::arg("concentration"), py::arg("n"));
  m.def("rebalance",
        [](const Rat& concentration, const ExactMeasure& base, const ExactKernel& r) {
          const auto spec = rebalance(MvpsSpec<Rat>(concentration, base, r));
          return py::make_tuple(py::cast(spec.concentration), py::cast(spec.reinforcement));
        },
        py::arg("concentration"), py::arg("base"), py::arg("reinforcement"),
        "Returns (scaled concentration, row-mass-one kernel) for an equal-row-mass model.");

  m.def("check_exchangeable",
        [](const ExactFamily& f, std::size_t max_len) {
          const auto report = check_exchangeable(f, max_len);
          py::dict d;
          d["exchangeable"] = report.exchangeable;
          d["max_length_checked"] = report.max_length_checked;
          d["counterexample"] = report.counterexample
                                    ? py::object(swap_counterexample_dict(*report.counterexample))
                                    : py::object(py::none());
          return d;
        },
        py::arg("family"), py::arg("max_len"));

  m.def("check_detailed_balance",
        [](const ExactMeasure& base, const ExactKernel& kernel) {
          return check_detailed_balance(base, kernel);
        },
        py::arg("base"), py::arg("kernel"));
  m.def("coefficient_defect",
        [](const Rat& a1, const Rat& a2) { return coefficient_defect(a1, a2); }, py::arg("a1"),
        py::arg("a2"));
  m.def("check_kernel_identity",
        [](const ExactMeasure& base, const ExactKernel& kernel, const Rat& defect) {
          return check_kernel_identity(base, kernel, defect);
        },
        py::arg("base"), py::arg("kernel"), py::arg("defect"));
  m.def("coefficient_solution",
        [](const Rat& a1, const Rat& defect, std::size_t n) {
          return coefficient_solution(a1, defect, n);
        },
        py::arg("a1"), py::arg("defect"), py::arg("n"));

  m.def("characterize",
        [](const ExactFamily& f, std::size_t max_len) {
          const auto result = characterize(f, max_len);
          py::dict d;
          switch (result.verdict) {
            case CharacterizationVerdict::Mvps:
              d["verdict"] = "mvps";
              break;
            case CharacterizationVerdict::NonExchangeable:
              d["verdict"] = "non_exchangeable";
              break;
            case CharacterizationVerdict::NotSufficientnessForm:
              d["verdict"] = "not_sufficientness_form";
              break;
          }
          d["concentration_hat"] = result.concentration_hat
                                       ? py::object(py::cast(*result.concentration_hat))
                                       : py::object(py::none());
          d["iid_degenerate"] = result.iid_degenerate;
          py::list trace;
          for (const auto& row : result.coefficient_trace) {
            py::dict r;
            r["n"] = row.n;
            r["observed"] = py::cast(row.observed);
            r["forced"] = py::cast(row.forced);
            trace.append(r);
          }
          d["coefficient_trace"] = trace;
          d["counterexample"] = result.counterexample
                                    ? py::object(swap_counterexample_dict(*result.counterexample))
                                    : py::object(py::none());
          return d;
        },
        py::arg("family"), py::arg("max_len"));

  m.def("check_johnson_sufficientness",
        [](const ExactFamily& f, const Partition& p, std::size_t max_len) {
          const auto report = check_johnson_sufficientness(f, p, max_len);
          py::dict d;
          d["holds"] = report.holds;
          d["max_length_checked"] = report.max_length_checked;
          d["counterexample"] =
              report.counterexample
                  ? py::object(sufficientness_counterexample_dict(*report.counterexample))
                  : py::object(py::none());
          return d;
        },
        py::arg("family"), py::arg("partition"), py::arg("max_len"));

  m.def("check_hill_sufficientness",
        [](const ExactFamily& f, std::vector<Rat> weights, const Partition& p,
           std::size_t max_len) {
          const auto report = check_hill_sufficientness<Rat>(f, weights, p, max_len);
          py::dict d;
          d["holds"] = report.holds;
          d["max_length_checked"] = report.max_length_checked;
          d["counterexample"] =
              report.counterexample
                  ? py::object(sufficientness_counterexample_dict(*report.counterexample))
                  : py::object(py::none());
          return d;
        },
        py::arg("family"), py::arg("weights"), py::arg("partition"), py::arg("max_len"));

  m.def("block_predictive_mass",
        [](const ExactFamily& f, const Partition& p, std::size_t block, std::size_t length,
           std::size_t block_count) {
          return block_predictive_mass(f, p, block, length, block_count);
        },
        py::arg("family"), py::arg("partition"), py::arg("block"), py::arg("length"),
        py::arg("block_count"));

  m.def("check_iid_degenerate",
        [](const ExactFamily& f, std::size_t max_len) { return check_iid_degenerate(f, max_len); },
        py::arg("family"), py::arg("max_len"));

  py::class_<GeneralMixtureModel>(m, "GeneralModel")
      .def(py::init([](const Rat& concentration,
                       std::vector<std::tuple<double, double, Rat>> bins) {
             std::vector<GeneralBin> gb;
             gb.reserve(bins.size());
             for (const auto& [lo, hi, prob] : bins) {
               gb.push_back({Interval{lo, hi}, prob, PiecewiseLinearCdf::uniform({lo, hi})});
             }
             return GeneralMixtureModel(concentration, std::move(gb));
           }),
           py::arg("concentration"), py::arg("bins"),
           "bins: list of (lo, hi, prob) with uniform within-bin sampling")
      .def_property_readonly("num_bins", &GeneralMixtureModel::num_bins)
      .def_property_readonly("concentration", &GeneralMixtureModel::concentration)
      .def_property_readonly("tail_mass", &GeneralMixtureModel::tail_mass)
      .def("bin_of", &GeneralMixtureModel::bin_of, py::arg("value"))
      .def("sample_urn",
           [](const GeneralMixtureModel& model, std::size_t n, std::uint64_t seed) {
             const auto t = sample_urn(model, n, seed);
             return py::make_tuple(t.values, t.blocks);
           },
           py::arg("n"), py::arg("seed"))
      .def("sample_hierarchical",
           [](const GeneralMixtureModel& model, std::size_t n, std::uint64_t seed) {
             const auto t = sample_hierarchical(model, n, seed);
             return py::make_tuple(t.values, t.blocks);
           },
           py::arg("n"), py::arg("seed"))
      .def("exact_block_law",
           [](const GeneralMixtureModel& model, std::vector<std::size_t> blocks) {
             return exact_block_law(model, blocks);
           },
           py::arg("blocks"))
      .def("compare_laws",
           [](const GeneralMixtureModel& model, std::size_t prefix_len, std::size_t replicates,
              std::uint64_t seed) {
             const auto report = compare_laws(model, prefix_len, replicates, seed);
             py::dict d;
             d["prefix_len"] = report.prefix_len;
             d["replicates"] = report.replicates;
             d["tv_urn"] = report.tv_urn;
             d["tv_hierarchical"] = report.tv_hierarchical;
             d["mc_error_bound"] = report.mc_error_bound;
             return d;
           },
           py::arg("prefix_len"), py::arg("replicates"), py::arg("seed"));

  m.def("log_likelihood",
        [](double concentration, const Partition& p, std::vector<double> nu,
           std::vector<std::size_t> traj) {
          return log_likelihood(concentration, p, nu, traj);
        },
        py::arg("concentration"), py::arg("partition"), py::arg("nu"), py::arg("trajectory"));

  m.def("fit_theta",
        [](const Partition& p, std::vector<double> nu, std::vector<std::size_t> traj) {
          return theta_fit_dict(fit_theta(p, nu, traj));
        },
        py::arg("partition"), py::arg("nu"), py::arg("trajectory"));

  m.def("fit_model",
        [](std::vector<std::size_t> traj, std::optional<std::size_t> k,
           std::optional<std::vector<double>> nu) {
          std::size_t states = 0;
          for (std::size_t x : traj) states = std::max(states, x + 1);
          if (nu) states = nu->size();
          if (k) states = *k;
          const auto result = fit_model(StateSpace::indexed(states), traj, nu);
          py::dict d;
          d["base_weights"] = result.base_weights;
          d["base_estimated"] = result.base_estimated;
          py::list table;
          for (const auto& pf : result.table) {
            py::dict row = theta_fit_dict(pf.fit);
            row["assignment"] = pf.partition.assignment();
            row["num_blocks"] = pf.partition.num_blocks();
            table.append(row);
          }
          d["table"] = table;
          d["best"] = table[0];
          return d;
        },
        py::arg("trajectory"), py::arg("k") = std::nullopt, py::arg("nu") = std::nullopt);
}
