// mgt: train, evaluate and inspect multi-hop graph transformer pose lifters.
//
//   mgt synth     --out data.mgtp --count 32 --frames 3
//   mgt train     --preset toy --data data.mgtp --out run/
//   mgt eval      run/checkpoint.mgtc --data data.mgtp --csv
//   mgt graph     --k-max 4
//   mgt gradcheck --tolerance 1e-4
//   mgt ablate    --axis hops --csv
//
// Exit codes: 0 ok, 1 validation, 2 divergence, 3 check failure.

#include <CLI11.hpp>

#include <iostream>

#include "mgt/cli/commands.hpp"

namespace {

void add_config_flags(CLI::App* cmd, mgt::cli::ConfigSource& src) {
  cmd->add_option("--config", src.config_path, "key = value run config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--preset", src.preset, "paper-default, gt-ablation or toy");
  cmd->add_option("--seed", src.seed, "overrides the config seed");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mgt::cli;
  init_logging();

  CLI::App app{"Multi-hop graph transformer for 2D-to-3D pose lifting"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
  add_config_flags(train_cmd, train.config);
  train_cmd->add_option("--data", train.data, "pose file");
  train_cmd->add_option("--out", train.out, "output directory");
  train_cmd->add_flag("--csv", train.csv, "history CSV on stdout");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "score a checkpoint on a pose file");
  eval_cmd->add_option("checkpoint", eval.checkpoint, "checkpoint file")->required();
  eval_cmd->add_option("--data", eval.data, "pose file")->required();
  eval_cmd->add_flag("--csv", eval.csv, "metrics CSV on stdout");
  eval_cmd->add_option("--dump-poses", eval.dump_poses, "write predicted/GT joints as CSV");

  GraphArgs graph;
  auto* graph_cmd = app.add_subcommand("graph", "hop distances, sparsity and spectra");
  graph_cmd->add_option("skeleton", graph.skeleton, "skeleton document (default Human3.6M)");
  graph_cmd->add_option("--k-max", graph.k_max, "largest hop count")->check(CLI::PositiveNumber);
  graph_cmd->add_flag("--csv", graph.csv, "per-k table as CSV on stdout");

  GradcheckArgs gradcheck;
  auto* gc_cmd = app.add_subcommand("gradcheck", "finite-difference check of every parameter");
  add_config_flags(gc_cmd, gradcheck.config);
  gc_cmd->add_option("--tolerance", gradcheck.tolerance, "max relative error");
  gc_cmd->add_flag("--csv", gradcheck.csv, "per-group CSV on stdout");

  AblateArgs ablate;
  auto* ablate_cmd = app.add_subcommand("ablate", "retrain variants along one axis");
  ablate_cmd->add_option("--axis", ablate.axis, "hops, frames, dcl or highorder")->required();
  add_config_flags(ablate_cmd, ablate.config);
  ablate_cmd->add_option("--data", ablate.data, "pose file (synthesized when omitted)");
  ablate_cmd->add_option("--epochs", ablate.epochs, "overrides the config epochs");
  ablate_cmd->add_flag("--csv", ablate.csv, "comparison CSV on stdout");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic pose file");
  synth_cmd->add_option("--out", synth.out, "pose file to write")->required();
  synth_cmd->add_option("--skeleton", synth.skeleton, "skeleton document (default Human3.6M)");
  synth_cmd->add_option("--count", synth.count, "number of samples");
  synth_cmd->add_option("--frames", synth.frames, "frames per sample");
  synth_cmd->add_option("--seed", synth.seed, "generator seed");
  synth_cmd->add_option("--noise", synth.noise, "std of 2D input noise");
  synth_cmd->add_option("--amplitude", synth.amplitude, "joint trajectory amplitude");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  auto& out = std::cout;
  auto& err = std::cerr;
  if (*train_cmd) return cmd_train(train, out, err);
  if (*eval_cmd) return cmd_eval(eval, out, err);
  if (*graph_cmd) return cmd_graph(graph, out, err);
  if (*gc_cmd) return cmd_gradcheck(gradcheck, out, err);
  if (*ablate_cmd) return cmd_ablate(ablate, out, err);
  return cmd_synth(synth, out, err);
}
