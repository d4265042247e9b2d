#include "mgt/cli/commands.hpp"

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "mgt/ad/grad_check.hpp"
#include "mgt/ad/ops.hpp"
#include "mgt/data/standardizer.hpp"
#include "mgt/data/synth.hpp"
#include "mgt/error.hpp"
#include "mgt/eval/metrics.hpp"
#include "mgt/graph/skeleton.hpp"
#include "mgt/model/checkpoint.hpp"
#include "mgt/train/loss.hpp"

namespace mgt::cli {

namespace fs = std::filesystem;

void init_logging() {
  auto logger = spdlog::stderr_color_mt("mgt");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("MGT_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps anything unrecognized to "off".
    if (level == spdlog::level::off && std::string_view(env) != "off") {
      spdlog::warn("MGT_LOG='{}' not recognized; keeping 'warn'", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kDivergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
}

RunConfig resolve(const ConfigSource& src, const std::string& default_preset) {
  RunConfig c;
  if (!src.config_path.empty()) {
    c = load_run_config(src.config_path);
  } else {
    c = preset(src.preset.empty() ? default_preset : src.preset);
  }
  if (src.seed) c.train.seed = *src.seed;
  c.validate();
  return c;
}

namespace {

void require_shape(const data::PoseDataset& ds, const model::ModelConfig& m,
                   const std::string& what) {
  if (ds.joints() != m.joints || ds.frames != m.frames) {
    throw ValidationError(fmt::format("{} has N={}, T={} but the model expects N={}, T={}", what,
                                      ds.joints(), ds.frames, m.joints, m.frames));
  }
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path.string());
  f.precision(17);
  return f;
}

// Human tables go to stdout unless machine-readable CSV owns it.
std::ostream& human(bool csv, std::ostream& out, std::ostream& err) { return csv ? err : out; }

}  // namespace

// --- train -----------------------------------------------------------------

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig rc = resolve(args.config, "paper-default");
    if (!args.data.empty()) rc.data = args.data;
    if (!args.out.empty()) rc.out = args.out;
    if (rc.data.empty()) throw ValidationError("no dataset given (use --data or a 'data' key)");
    if (rc.out.empty()) throw ValidationError("no output directory given (use --out)");

    const auto ds = data::load_dataset(rc.data);
    if (ds.empty()) throw ValidationError(rc.data + ": dataset has no samples");
    require_shape(ds, rc.model, rc.data);

    const auto standardizer = rc.standardize ? data::Standardizer::fit(ds) : data::Standardizer{};
    const auto train_set = standardizer.apply(ds);
    model::MgtNet net(rc.model, ds.skeleton, rc.train.seed);

    const fs::path dir(rc.out);
    fs::create_directories(dir);
    {
      auto f = open_output(dir / "config.txt");
      f << to_document(rc).serialize();
    }
    auto history = open_output(dir / "history.csv");
    history << train::history_csv_header() << '\n';
    auto& log = human(args.csv, out, err);
    log << fmt::format("training {} parameters on {} samples ({} epochs)\n", net.param_count(),
                       ds.size(), rc.train.epochs);
    if (args.csv) out << train::history_csv_header() << '\n';

    train::TrainOptions opts;
    opts.checkpoint_path = (dir / "checkpoint.mgtc").string();
    opts.standardizer = standardizer;
    opts.on_epoch = [&](const train::EpochRecord& r) {
      const auto row = train::history_csv_row(r);
      history << row << '\n' << std::flush;
      if (args.csv) {
        out << row << '\n';
      } else {
        out << fmt::format("epoch {:>4}  lr {:.3e}  loss {:.6g}  mpjpe {:.6g} {}\n", r.epoch,
                           r.lr, r.train_loss, r.eval_mpjpe, ds.unit);
      }
    };
    train::train(net, train_set, rc.train, opts);
    log << "wrote " << (dir / "checkpoint.mgtc").string() << ", history.csv, config.txt\n";
    return kOk;
  });
}

// --- eval ------------------------------------------------------------------

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.checkpoint.empty()) throw ValidationError("no checkpoint given");
    if (args.data.empty()) throw ValidationError("no dataset given (use --data)");
    const auto ckpt = model::load_checkpoint(args.checkpoint);
    const auto ds = data::load_dataset(args.data);
    if (ds.empty()) throw ValidationError(args.data + ": dataset has no samples");
    require_shape(ds, ckpt.net.config(), args.data);
    if (ds.unit != ckpt.unit) {
      spdlog::warn("dataset unit '{}' differs from the checkpoint's '{}'", ds.unit, ckpt.unit);
    }

    const auto inputs = ckpt.standardizer.apply(ds);
    std::vector<ad::Tensor> preds, gts;
    std::vector<std::string> actions;
    for (const auto& s : inputs.samples) {
      preds.push_back(ckpt.net.forward(s.input).detach());
      gts.push_back(s.target);
      actions.push_back(s.action);
    }
    eval::EvalSettings settings;
    settings.pck_threshold = eval::default_pck_threshold(ds.unit);
    settings.auc_grid = eval::auc_grid_for_unit(ds.unit);
    const auto report = eval::evaluate(preds, gts, actions, ds.unit, settings);

    if (args.csv) eval::write_csv(out, report);
    eval::write_table(human(args.csv, out, err), report);

    if (!args.dump_poses.empty()) {
      auto f = open_output(args.dump_poses);
      f << "sample,action,joint,pred_x,pred_y,pred_z,gt_x,gt_y,gt_z\n";
      const auto& names = ds.skeleton.joint_names();
      for (std::size_t i = 0; i < preds.size(); ++i)
        for (std::size_t j = 0; j < names.size(); ++j) {
          f << fmt::format("{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", i,
                           actions[i], names[j], preds[i].at(j, 0), preds[i].at(j, 1),
                           preds[i].at(j, 2), gts[i].at(j, 0), gts[i].at(j, 1), gts[i].at(j, 2));
        }
    }
    return kOk;
  });
}

// --- graph -----------------------------------------------------------------

int cmd_graph(const GraphArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto g = args.skeleton.empty() ? graph::SkeletonGraph::human36m()
                                         : graph::load_skeleton(args.skeleton);
    g.require_connected();
    const auto d = graph::hop_distances(g);
    const auto rows = graph::sparsity_report(g, args.k_max);
    const std::size_t n = g.num_joints();

    auto& h = human(args.csv, out, err);
    h << "hop distances\n";
    for (std::size_t i = 0; i < n; ++i) {
      h << fmt::format("{:>12}", g.joint_names()[i]);
      for (std::size_t j = 0; j < n; ++j) h << fmt::format(" {:>2}", d(i, j));
      h << '\n';
    }
    h << fmt::format("max hops from root '{}': {}\ndiameter: {}\n\n",
                     g.joint_names()[g.root()], d.eccentricity(g.root()), d.diameter());

    if (args.csv) out << "k,nnz_k_adjacency,nnz_power,eig_min,eig_max\n";
    h << fmt::format("{:>3} {:>16} {:>12} {:>10} {:>10}\n", "k", "nnz(A_k)", "nnz(A^k)",
                     "eig_min", "eig_max");
    for (const auto& r : rows) {
      const auto [lo, hi] =
          graph::eigenvalue_range(graph::normalize_adjacency(graph::k_adjacency(d, r.k)));
      if (args.csv) {
        out << fmt::format("{},{},{},{:.17g},{:.17g}\n", r.k, r.nnz_k_adjacency, r.nnz_power,
                           lo, hi);
      }
      h << fmt::format("{:>3} {:>16} {:>12} {:>10.4f} {:>10.4f}\n", r.k, r.nnz_k_adjacency,
                       r.nnz_power, lo, hi);
    }
    return kOk;
  });
}

// --- gradcheck -------------------------------------------------------------

namespace {

// Finite differences cost two forward passes per scalar parameter.
constexpr std::size_t kMaxGradcheckSize = 4096;  // N * F * L

graph::SkeletonGraph skeleton_for(std::size_t joints) {
  if (joints == 17) return graph::SkeletonGraph::human36m();
  std::vector<std::string> names;
  std::vector<graph::Edge> edges;
  for (std::size_t i = 0; i < joints; ++i) {
    names.push_back("j" + std::to_string(i));
    if (i > 0) edges.push_back({i - 1, i});
  }
  return graph::SkeletonGraph(std::move(names), std::move(edges), 0);
}

}  // namespace

int cmd_gradcheck(const GradcheckArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = resolve(args.config, "toy");
    const auto& m = rc.model;
    const std::size_t size = m.joints * m.features * m.layers;
    if (size > kMaxGradcheckSize) {
      throw ValidationError(fmt::format(
          "config too large for finite differences: N*F*L = {} exceeds {} (use the toy preset)",
          size, kMaxGradcheckSize));
    }
    if (!(args.tolerance > 0.0)) throw ValidationError("tolerance must be positive");

    const auto skeleton = skeleton_for(m.joints);
    const auto raw = data::synthesize(skeleton, 2, m.frames, rc.train.seed, 0.01);
    const auto ds = data::Standardizer::fit(raw).apply(raw);
    model::MgtNet net(m, skeleton, rc.train.seed);

    auto loss = [&] {
      std::vector<ad::Tensor> preds, targets;
      for (const auto& s : ds.samples) {
        auto y = net.forward(s.input);
        preds.push_back(args.output_hook ? args.output_hook(y) : y);
        targets.push_back(s.target);
      }
      return train::elastic_loss(ad::stack(preds), ad::stack(targets), rc.train.alpha,
                                 rc.train.reduction);
    };
    ad::GradCheckOptions opts;
    opts.tolerance = args.tolerance;
    const auto report = ad::grad_check_parameters(loss, net.parameters(), opts);

    auto& h = human(args.csv, out, err);
    if (args.csv) out << "group,size,max_rel_error,analytic,numeric,passed\n";
    h << fmt::format("{:<40} {:>6} {:>12} {:>14} {:>14}\n", "parameter group", "size",
                     "max rel err", "analytic", "numeric");
    for (const auto& g : report.groups) {
      const bool ok = g.max_error < args.tolerance;
      if (args.csv) {
        out << fmt::format("{},{},{:.6e},{:.17g},{:.17g},{}\n", g.name, g.size, g.max_error,
                           g.analytic, g.numeric, ok ? 1 : 0);
      }
      h << fmt::format("{:<40} {:>6} {:>12.3e} {:>14.6e} {:>14.6e}{}\n", g.name, g.size,
                       g.max_error, g.analytic, g.numeric, ok ? "" : "  FAIL");
    }
    if (!report.passed) {
      err << fmt::format("gradient check failed: worst group '{}' has relative error {:.3e} "
                         "(tolerance {:.1e})\n",
                         report.worst_group, report.max_error, args.tolerance);
      return kCheckFailed;
    }
    h << fmt::format("gradient check passed: max relative error {:.3e} (tolerance {:.1e})\n",
                     report.max_error, args.tolerance);
    return kOk;
  });
}

// --- ablate ----------------------------------------------------------------

std::vector<std::string> ablation_axes() { return {"hops", "frames", "dcl", "highorder"}; }

std::vector<AblationRow> run_ablation(const std::string& axis, const RunConfig& base,
                                      const data::PoseDataset& dataset) {
  struct Variant {
    std::string name;
    model::ModelConfig config;
  };
  std::vector<Variant> variants;
  auto with = [&](std::string name, auto&& edit) {
    model::ModelConfig c = base.model;
    edit(c);
    variants.push_back({std::move(name), c});
  };
  if (axis == "hops") {
    for (std::size_t k : {0, 1, 2}) {
      with(fmt::format("{}-hop", k), [k](auto& c) { c.max_hops = k; });
    }
  } else if (axis == "frames") {
    for (std::size_t t : {1, 3, 9}) {
      if (t <= dataset.frames) with(fmt::format("T={}", t), [t](auto& c) { c.frames = t; });
    }
  } else if (axis == "dcl") {
    with("with-dcl", [](auto& c) { c.dilated_conv = true; });
    with("without-dcl", [](auto& c) { c.dilated_conv = false; });
  } else if (axis == "highorder") {
    with("multi-hop", [](auto& c) { c.gconv = model::GConvKind::kMultiHop; });
    with("high-order", [](auto& c) { c.gconv = model::GConvKind::kHighOrder; });
  } else {
    throw ValidationError("unknown ablation axis '" + axis +
                          "' (expected hops, frames, dcl or highorder)");
  }

  std::vector<AblationRow> rows;
  for (const auto& v : variants) {
    const auto raw = v.config.frames == dataset.frames ? dataset
                                                       : data::last_frames(dataset, v.config.frames);
    require_shape(raw, v.config, "ablation data");
    const auto st = base.standardize ? data::Standardizer::fit(raw) : data::Standardizer{};
    const auto ds = st.apply(raw);
    model::MgtNet net(v.config, ds.skeleton, base.train.seed);
    const auto history = train::train(net, ds, base.train);
    rows.push_back({axis, v.name, net.param_count(), history.back().train_loss,
                    history.back().eval_mpjpe});
    spdlog::debug("ablation {} {}: params {} loss {:.6g}", axis, v.name, rows.back().params,
                 rows.back().final_loss);
  }
  return rows;
}

int cmd_ablate(const AblateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto axes = ablation_axes();
    if (std::find(axes.begin(), axes.end(), args.axis) == axes.end()) {
      throw ValidationError("unknown ablation axis '" + args.axis +
                            "' (expected hops, frames, dcl or highorder)");
    }
    RunConfig rc = resolve(args.config, "toy");
    if (args.epochs) rc.train.epochs = *args.epochs;
    rc.train.validate();

    data::PoseDataset ds;
    if (!args.data.empty()) {
      ds = data::load_dataset(args.data);
    } else {
      const std::size_t frames = args.axis == "frames" ? 9 : rc.model.frames;
      ds = data::synthesize(skeleton_for(rc.model.joints), 32, frames, rc.train.seed, 0.0);
    }
    if (ds.empty()) throw ValidationError("ablation dataset has no samples");
    if (args.axis != "frames") {
      if (ds.frames < rc.model.frames) require_shape(ds, rc.model, "ablation data");
      if (ds.frames > rc.model.frames) ds = data::last_frames(ds, rc.model.frames);
    }

    const auto rows = run_ablation(args.axis, rc, ds);
    auto& h = human(args.csv, out, err);
    if (args.csv) out << "axis,variant,params,final_loss,mpjpe\n";
    h << fmt::format("{:<12} {:>10} {:>14} {:>14}\n", "variant", "params", "final loss",
                     "mpjpe (" + ds.unit + ")");
    for (const auto& r : rows) {
      if (args.csv) {
        out << fmt::format("{},{},{},{:.17g},{:.17g}\n", r.axis, r.variant, r.params,
                           r.final_loss, r.mpjpe);
      }
      h << fmt::format("{:<12} {:>10} {:>14.6g} {:>14.6g}\n", r.variant, r.params, r.final_loss,
                       r.mpjpe);
    }
    return kOk;
  });
}

// --- synth -----------------------------------------------------------------

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.out.empty()) throw ValidationError("no output file given (use --out)");
    const auto skeleton = args.skeleton.empty() ? graph::SkeletonGraph::human36m()
                                                : graph::load_skeleton(args.skeleton);
    data::SynthOptions opts;
    opts.count = args.count;
    opts.frames = args.frames;
    opts.seed = args.seed;
    opts.noise_sigma = args.noise;
    opts.amplitude = args.amplitude;
    data::save_dataset(args.out, data::synthesize(skeleton, opts));
    out << fmt::format("wrote {} samples (N={}, T={}) to {}\n", args.count,
                       skeleton.num_joints(), args.frames, args.out);
    return kOk;
  });
}

}  // namespace mgt::cli
