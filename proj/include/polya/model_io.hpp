#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "polya/general_space.hpp"
#include "polya/partition.hpp"
#include "polya/process.hpp"

namespace polya {

enum class ScalarMode { Exact, Float };

// How the reinforcement kernel was stated in the file. Kept so a parsed model
// serializes back to the same structure.
enum class KernelForm { Partition, Identity, Iid, Explicit };

// Finite model as read from a JSON file. Files whose numbers are all integers
// or "p/q" strings parse into the exact family; any decimal switches the
// whole model to the float family.
struct FiniteModel {
  ScalarMode mode = ScalarMode::Exact;
  StateSpacePtr space;
  KernelForm kernel_form = KernelForm::Iid;
  std::optional<PredictiveFamily<Rat>> exact;
  std::optional<PredictiveFamily<double>> approx;
  // Present when the kernel is structurally a conditional kernel: stated as a
  // partition, the identity (singleton blocks), iid (one block), or an
  // explicit kernel recognized by recover_partition.
  std::optional<Partition> partition;
  double tol = kDefaultTol;
};

struct GeneralModelFile {
  GeneralMixtureModel model;
};

using ParsedModel = std::variant<FiniteModel, GeneralModelFile>;

// Throws ParseError for malformed JSON or number literals, ValidationError
// for structurally bad models.
ParsedModel parse_model(const nlohmann::json& j);
ParsedModel load_model(const std::string& path);

nlohmann::json model_to_json(const FiniteModel& model);
nlohmann::json model_to_json(const GeneralModelFile& model);
nlohmann::json model_to_json(const ParsedModel& model);

// "step,state" rows, 0-based state indices in state order.
void write_trajectory_csv(std::ostream& out, const Trajectory& t);

// Reads the format written above. Steps must count up from 0. Errors carry
// 1-based line numbers.
std::vector<std::size_t> read_trajectory_csv(std::istream& in);

// "step,value,block" rows for general-space trajectories.
void write_real_trajectory_csv(std::ostream& out, const RealTrajectory& t);

}  // namespace polya
