#include "polya/model_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string_view>
#include <utility>

#include "polya/error.hpp"

namespace polya {

namespace {

using nlohmann::json;

// Scalar literal from a model file. Integers and "p/q" strings stay exact;
// any decimal flips the whole model to float mode.
struct NumVal {
  Rat exact;
  double approx = 0.0;
  bool is_exact = false;
};

NumVal parse_scalar(const json& j, const std::string& where) {
  if (j.is_string()) {
    Rat r;
    try {
      r = parse_rational(j.get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
    return {r, to_double(r), true};
  }
  if (j.is_number_integer()) {
    const auto v = j.get<long long>();
    return {Rat(v), static_cast<double>(v), true};
  }
  if (j.is_number_float()) {
    return {Rat(0), j.get<double>(), false};
  }
  throw ParseError(where + ": expected a number or a \"p/q\" string");
}

const json& require_field(const json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end()) throw ParseError(std::string("missing field '") + name + "'");
  return *it;
}

std::vector<NumVal> parse_scalar_array(const json& j, std::size_t expected,
                                       const std::string& where) {
  if (!j.is_array() || j.size() != expected) {
    throw ParseError(where + ": expected an array of " + std::to_string(expected) + " entries");
  }
  std::vector<NumVal> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(parse_scalar(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

struct RawFinite {
  StateSpacePtr space;
  KernelForm kernel_form = KernelForm::Iid;
  std::optional<Partition> stated_partition;
  std::vector<NumVal> nu;
  std::optional<NumVal> theta;
  std::vector<std::vector<NumVal>> rows;  // explicit kernels only
  std::optional<std::vector<NumVal>> coefficient_values;
  double tol = kDefaultTol;
};

template <class S>
S pick(const NumVal& v) {
  if constexpr (scalar_traits<S>::exact) {
    return v.exact;
  } else {
    return v.approx;
  }
}

template <class S>
std::vector<S> pick_all(const std::vector<NumVal>& vs) {
  std::vector<S> out;
  out.reserve(vs.size());
  for (const auto& v : vs) out.push_back(pick<S>(v));
  return out;
}

template <class S>
PredictiveFamily<S> build_family(const RawFinite& raw) {
  Measure<S> nu(raw.space, pick_all<S>(raw.nu));
  if (raw.kernel_form == KernelForm::Iid) {
    return PredictiveFamily<S>::iid(std::move(nu), raw.tol);
  }
  std::optional<Kernel<S>> kernel;
  switch (raw.kernel_form) {
    case KernelForm::Partition:
      kernel = conditional_kernel<S>(nu, *raw.stated_partition, raw.tol);
      break;
    case KernelForm::Identity:
      kernel = Kernel<S>::identity(raw.space);
      break;
    case KernelForm::Explicit: {
      std::vector<Measure<S>> rows;
      rows.reserve(raw.rows.size());
      for (const auto& row : raw.rows) rows.emplace_back(raw.space, pick_all<S>(row));
      kernel = Kernel<S>(raw.space, std::move(rows));
      break;
    }
    case KernelForm::Iid:
      break;
  }
  if (raw.coefficient_values) {
    return PredictiveFamily<S>::sufficientness(
        std::move(nu), std::move(*kernel),
        CoefficientSequence<S>::from_list(pick_all<S>(*raw.coefficient_values)), raw.tol);
  }
  return PredictiveFamily<S>::mvps(
      MvpsSpec<S>(pick<S>(*raw.theta), std::move(nu), std::move(*kernel), raw.tol));
}

FiniteModel parse_finite(const json& j) {
  RawFinite raw;

  const json& jstates = require_field(j, "states");
  if (!jstates.is_array() || jstates.empty()) {
    throw ParseError("'states' must be a nonempty array of labels");
  }
  std::vector<std::string> labels;
  labels.reserve(jstates.size());
  for (const auto& s : jstates) {
    if (!s.is_string()) throw ParseError("'states' entries must be strings");
    labels.push_back(s.get<std::string>());
  }
  raw.space = StateSpace::make(std::move(labels));
  const std::size_t k = raw.space->size();

  raw.nu = parse_scalar_array(require_field(j, "nu"), k, "'nu'");

  const json& jkernel = require_field(j, "kernel");
  if (!jkernel.is_object()) throw ParseError("'kernel' must be an object");
  const json& jtype = require_field(jkernel, "type");
  const std::string kernel_type = jtype.is_string() ? jtype.get<std::string>() : "";
  if (kernel_type == "partition") {
    raw.kernel_form = KernelForm::Partition;
    const json& jblocks = require_field(jkernel, "blocks");
    if (!jblocks.is_array()) throw ParseError("'kernel.blocks' must be an array of arrays");
    std::vector<std::vector<std::string>> blocks;
    for (const auto& b : jblocks) {
      if (!b.is_array()) throw ParseError("'kernel.blocks' must be an array of arrays");
      std::vector<std::string> block;
      for (const auto& s : b) {
        if (!s.is_string()) throw ParseError("'kernel.blocks' entries must be labels");
        block.push_back(s.get<std::string>());
      }
      blocks.push_back(std::move(block));
    }
    raw.stated_partition = Partition::from_blocks(raw.space, blocks);
  } else if (kernel_type == "identity") {
    raw.kernel_form = KernelForm::Identity;
  } else if (kernel_type == "iid") {
    raw.kernel_form = KernelForm::Iid;
  } else if (kernel_type == "explicit") {
    raw.kernel_form = KernelForm::Explicit;
    const json& jrows = require_field(jkernel, "rows");
    if (!jrows.is_array() || jrows.size() != k) {
      throw ParseError("'kernel.rows' must list one row per state");
    }
    for (std::size_t x = 0; x < k; ++x) {
      raw.rows.push_back(
          parse_scalar_array(jrows[x], k, "'kernel.rows[" + std::to_string(x) + "]'"));
    }
  } else {
    throw ParseError("'kernel.type' must be one of partition, identity, iid, explicit");
  }

  if (const auto it = j.find("coefficients"); it != j.end()) {
    if (raw.kernel_form == KernelForm::Iid) {
      throw ValidationError("an iid kernel takes no coefficients");
    }
    const json& jc = *it;
    if (!jc.is_object()) throw ParseError("'coefficients' must be an object");
    const json& ct = require_field(jc, "type");
    const std::string coeff_type = ct.is_string() ? ct.get<std::string>() : "";
    if (coeff_type == "list") {
      const json& jv = require_field(jc, "values");
      if (!jv.is_array() || jv.empty()) {
        throw ParseError("'coefficients.values' must be a nonempty array");
      }
      raw.coefficient_values = parse_scalar_array(jv, jv.size(), "'coefficients.values'");
    } else if (coeff_type != "mvps") {
      throw ParseError("'coefficients.type' must be mvps or list");
    }
  }

  if (const auto it = j.find("theta"); it != j.end()) {
    if (raw.kernel_form == KernelForm::Iid) {
      throw ValidationError("an iid kernel takes no concentration; drop 'theta'");
    }
    if (raw.coefficient_values) {
      throw ValidationError("'theta' and an explicit coefficient list cannot be combined");
    }
    raw.theta = parse_scalar(*it, "'theta'");
  }
  if (raw.kernel_form != KernelForm::Iid && !raw.coefficient_values && !raw.theta) {
    throw ParseError("missing field 'theta'");
  }

  if (const auto it = j.find("tol"); it != j.end()) {
    if (!it->is_number()) throw ParseError("'tol' must be a number");
    raw.tol = it->get<double>();
    if (!(raw.tol > 0.0)) throw ValidationError("'tol' must be positive");
  }

  bool exact = true;
  for (const auto& v : raw.nu) exact = exact && v.is_exact;
  if (raw.theta) exact = exact && raw.theta->is_exact;
  for (const auto& row : raw.rows) {
    for (const auto& v : row) exact = exact && v.is_exact;
  }
  if (raw.coefficient_values) {
    for (const auto& v : *raw.coefficient_values) exact = exact && v.is_exact;
  }

  FiniteModel model;
  model.mode = exact ? ScalarMode::Exact : ScalarMode::Float;
  model.space = raw.space;
  model.kernel_form = raw.kernel_form;
  model.tol = raw.tol;
  if (exact) {
    model.exact = build_family<Rat>(raw);
  } else {
    model.approx = build_family<double>(raw);
  }

  switch (raw.kernel_form) {
    case KernelForm::Partition:
      model.partition = std::move(raw.stated_partition);
      break;
    case KernelForm::Identity:
      model.partition = Partition::discrete(raw.space);
      break;
    case KernelForm::Iid:
      model.partition = Partition::trivial(raw.space);
      break;
    case KernelForm::Explicit:
      // Recognize conditional kernels stated entry by entry.
      if (exact) {
        model.partition =
            recover_partition<Rat>(model.exact->base_measure(), model.exact->reinforcement());
      } else {
        model.partition = recover_partition<double>(model.approx->base_measure(),
                                                    model.approx->reinforcement(), raw.tol);
      }
      break;
  }
  return model;
}

GeneralModelFile parse_general(const json& j) {
  const NumVal theta = parse_scalar(require_field(j, "theta"), "'theta'");
  if (!theta.is_exact) {
    throw ParseError("general model: 'theta' must be exact (integer or \"p/q\")");
  }
  const json& jbins = require_field(j, "bins");
  if (!jbins.is_array() || jbins.empty()) {
    throw ParseError("'bins' must be a nonempty array");
  }
  std::vector<GeneralBin> bins;
  bins.reserve(jbins.size());
  for (std::size_t l = 0; l < jbins.size(); ++l) {
    const json& jb = jbins[l];
    const std::string where = "'bins[" + std::to_string(l) + "]'";
    if (!jb.is_object()) throw ParseError(where + ": expected an object");
    const json& jlo = require_field(jb, "lo");
    const json& jhi = require_field(jb, "hi");
    if (!jlo.is_number() || !jhi.is_number()) {
      throw ParseError(where + ": 'lo' and 'hi' must be numbers");
    }
    const Interval iv{jlo.get<double>(), jhi.get<double>()};
    const NumVal prob = parse_scalar(require_field(jb, "prob"), where + ".prob");
    if (!prob.is_exact) {
      throw ParseError(where + ": 'prob' must be exact (integer or \"p/q\")");
    }
    if (const auto it = jb.find("cdf"); it != jb.end()) {
      const json& jcdf = *it;
      const json& jx = require_field(jcdf, "x");
      const json& jf = require_field(jcdf, "F");
      if (!jx.is_array() || !jf.is_array()) {
        throw ParseError(where + ": 'cdf.x' and 'cdf.F' must be arrays");
      }
      std::vector<double> xs, fs;
      for (const auto& v : jx) xs.push_back(v.get<double>());
      for (const auto& v : jf) fs.push_back(v.get<double>());
      bins.push_back({iv, prob.exact, PiecewiseLinearCdf(std::move(xs), std::move(fs))});
    } else {
      bins.push_back({iv, prob.exact, PiecewiseLinearCdf::uniform(iv)});
    }
  }
  bool truncated = false;
  if (const auto it = j.find("truncated"); it != j.end()) {
    if (!it->is_boolean()) throw ParseError("'truncated' must be a boolean");
    truncated = it->get<bool>();
  }
  if (truncated) {
    return {GeneralMixtureModel::truncated(theta.exact, std::move(bins))};
  }
  return {GeneralMixtureModel(theta.exact, std::move(bins))};
}

}  // namespace

ParsedModel parse_model(const json& j) {
  try {
    if (!j.is_object()) throw ParseError("model file must be a JSON object");
    std::string type = "finite";
    if (const auto it = j.find("type"); it != j.end()) {
      if (!it->is_string()) throw ParseError("'type' must be a string");
      type = it->get<std::string>();
    }
    if (type == "finite") return parse_finite(j);
    if (type == "general") return parse_general(j);
    throw ParseError("'type' must be finite or general");
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model JSON: ") + e.what());
  }
}

ParsedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte offset; surface its message verbatim.
    throw ParseError(path + ": " + e.what());
  }
  try {
    return parse_model(j);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

namespace {

template <class S>
json scalar_to_json(const S& v) {
  if constexpr (scalar_traits<S>::exact) {
    return format_rational(v);
  } else {
    return v;
  }
}

template <class S>
json family_to_json(const PredictiveFamily<S>& family, const FiniteModel& model) {
  json out;
  out["type"] = "finite";
  out["states"] = model.space->labels();
  json nu = json::array();
  for (const S& w : family.base_measure().weights()) nu.push_back(scalar_to_json(w));
  out["nu"] = std::move(nu);

  json kernel;
  switch (model.kernel_form) {
    case KernelForm::Partition: {
      kernel["type"] = "partition";
      json blocks = json::array();
      for (const auto& block : model.partition->members()) {
        json b = json::array();
        for (std::size_t j : block) b.push_back(model.space->label(j));
        blocks.push_back(std::move(b));
      }
      kernel["blocks"] = std::move(blocks);
      break;
    }
    case KernelForm::Identity:
      kernel["type"] = "identity";
      break;
    case KernelForm::Iid:
      kernel["type"] = "iid";
      break;
    case KernelForm::Explicit: {
      kernel["type"] = "explicit";
      json rows = json::array();
      for (std::size_t x = 0; x < family.reinforcement().size(); ++x) {
        json row = json::array();
        for (const S& w : family.reinforcement().row(x).weights()) {
          row.push_back(scalar_to_json(w));
        }
        rows.push_back(std::move(row));
      }
      kernel["rows"] = std::move(rows);
      break;
    }
  }
  out["kernel"] = std::move(kernel);

  using Kind = typename PredictiveFamily<S>::Kind;
  if (family.kind() == Kind::Mvps) {
    out["theta"] = scalar_to_json(*family.concentration());
    out["coefficients"] = {{"type", "mvps"}};
  } else if (family.kind() == Kind::Sufficientness) {
    const auto& coeffs = *family.coefficients();
    if (coeffs.is_closed_form()) {
      // Closed-form coefficients and the urn statement define the same law.
      out["theta"] = scalar_to_json(*coeffs.concentration());
      out["coefficients"] = {{"type", "mvps"}};
    } else {
      json values = json::array();
      for (std::size_t n = 1; n <= *coeffs.horizon(); ++n) {
        values.push_back(scalar_to_json(coeffs.at(n)));
      }
      out["coefficients"] = {{"type", "list"}, {"values", std::move(values)}};
    }
  }
  if (model.mode == ScalarMode::Float) out["tol"] = model.tol;
  return out;
}

}  // namespace

json model_to_json(const FiniteModel& model) {
  if (model.mode == ScalarMode::Exact) {
    return family_to_json<Rat>(*model.exact, model);
  }
  return family_to_json<double>(*model.approx, model);
}

json model_to_json(const GeneralModelFile& file) {
  const GeneralMixtureModel& m = file.model;
  json out;
  out["type"] = "general";
  out["theta"] = format_rational(m.concentration());
  const bool truncated = m.tail_mass() > 0;
  json bins = json::array();
  for (std::size_t l = 0; l < m.num_bins(); ++l) {
    const GeneralBin& b = m.bin(l);
    json jb;
    jb["lo"] = b.interval.lo;
    jb["hi"] = b.interval.hi;
    // Stored probabilities are renormalized; scale back by the kept mass so a
    // truncated model reparses with the same tail.
    const Rat stated = truncated ? Rat(b.prob * (Rat(1) - m.tail_mass())) : b.prob;
    jb["prob"] = format_rational(stated);
    jb["cdf"] = {{"x", b.within.knots()}, {"F", b.within.values()}};
    bins.push_back(std::move(jb));
  }
  out["bins"] = std::move(bins);
  if (truncated) out["truncated"] = true;
  return out;
}

json model_to_json(const ParsedModel& model) {
  if (std::holds_alternative<FiniteModel>(model)) {
    return model_to_json(std::get<FiniteModel>(model));
  }
  return model_to_json(std::get<GeneralModelFile>(model));
}

void write_trajectory_csv(std::ostream& out, const Trajectory& t) {
  out << "step,state\n";
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    out << i << ',' << t.values[i] << '\n';
  }
}

namespace {

std::size_t parse_index_field(std::string_view field, std::size_t lineno, const char* what) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("line " + std::to_string(lineno) + ": bad " + what + " '" +
                     std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::vector<std::size_t> read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("line 1: missing 'step,state' header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "step,state") throw ParseError("line 1: expected header 'step,state'");
  std::vector<std::size_t> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError("line " + std::to_string(lineno) + ": expected 'step,state'");
    }
    const std::size_t step =
        parse_index_field(std::string_view(line).substr(0, comma), lineno, "step");
    const std::size_t state =
        parse_index_field(std::string_view(line).substr(comma + 1), lineno, "state");
    if (step != out.size()) {
      throw ParseError("line " + std::to_string(lineno) + ": step " + std::to_string(step) +
                       " out of order, expected " + std::to_string(out.size()));
    }
    out.push_back(state);
  }
  return out;
}

void write_real_trajectory_csv(std::ostream& out, const RealTrajectory& t) {
  out << "step,value,block\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    out << i << ',' << t.values[i] << ',' << t.blocks[i] << '\n';
  }
}

}  // namespace polya
