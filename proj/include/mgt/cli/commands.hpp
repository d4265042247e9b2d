#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mgt/ad/tensor.hpp"
#include "mgt/cli/run_config.hpp"
#include "mgt/data/dataset.hpp"

namespace mgt::cli {

// Stable process exit codes.
enum ExitCode : int { kOk = 0, kValidation = 1, kDivergence = 2, kCheckFailed = 3 };

// Reads MGT_LOG (trace, debug, info, warn, error, off; default warn) and
// routes library logging to standard error.
void init_logging();

// Runs `body`, turning library errors into a message on `err` and the
// matching exit code.
int guarded(std::ostream& err, const std::function<int()>& body);

// Config source shared by the commands: a config file wins over a preset
// name; command-line flags override both.
struct ConfigSource {
  std::string config_path;
  std::string preset;  // empty: the command's default
  std::optional<std::uint64_t> seed;
};
RunConfig resolve(const ConfigSource& src, const std::string& default_preset);

struct TrainArgs {
  ConfigSource config;
  std::string data;
  std::string out;
  bool csv = false;
};
// Writes <out>/checkpoint.mgtc, <out>/history.csv and <out>/config.txt.
int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err);

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  bool csv = false;
  std::string dump_poses;  // CSV of predicted and ground-truth joints
};
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);

struct GraphArgs {
  std::string skeleton;  // skeleton document; built-in Human3.6M when empty
  std::size_t k_max = 4;
  bool csv = false;
};
int cmd_graph(const GraphArgs& args, std::ostream& out, std::ostream& err);

struct GradcheckArgs {
  ConfigSource config;  // default preset: toy
  double tolerance = 1e-4;
  bool csv = false;
  // Applied to every network output before the loss. Tests use it to splice
  // in an op with a deliberately wrong backward rule.
  std::function<ad::Tensor(const ad::Tensor&)> output_hook;
};
int cmd_gradcheck(const GradcheckArgs& args, std::ostream& out, std::ostream& err);

struct AblationRow {
  std::string axis;
  std::string variant;
  std::size_t params = 0;
  double final_loss = 0.0;
  double mpjpe = 0.0;
};

std::vector<std::string> ablation_axes();
// Trains every variant of `axis` from scratch on the same data and seed.
// hops: K = 0, 1, 2; frames: T = 1, 3, 9 (those the data can supply);
// dcl: with / without dilated convolutions; highorder: multi-hop vs
// adjacency powers.
std::vector<AblationRow> run_ablation(const std::string& axis, const RunConfig& base,
                                      const data::PoseDataset& dataset);

struct AblateArgs {
  std::string axis;
  ConfigSource config;  // default preset: toy
  std::string data;     // synthesized when empty
  std::optional<std::size_t> epochs;
  bool csv = false;
};
int cmd_ablate(const AblateArgs& args, std::ostream& out, std::ostream& err);

struct SynthArgs {
  std::string out;
  std::string skeleton;
  std::size_t count = 32;
  std::size_t frames = 3;
  std::uint64_t seed = 0;
  double noise = 0.0;
  double amplitude = 0.05;
};
int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);

}  // namespace mgt::cli
