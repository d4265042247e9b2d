#include "mgt/cli/run_config.hpp"

#include <fstream>
#include <sstream>

#include "mgt/error.hpp"
#include "mgt/model/checkpoint.hpp"

namespace mgt::cli {

void RunConfig::validate() const {
  model.validate();
  train.validate();
}

RunConfig preset(std::string_view name) {
  RunConfig c;
  c.preset = std::string(name);
  if (name == "paper-default") return c;
  if (name == "gt-ablation") {
    c.model = model::gt_ablation_config();
    return c;
  }
  if (name == "toy") {
    c.model = model::toy_config();
    c.train.decay = 1.0;
    c.train.batch_size = 8;
    c.train.epochs = 300;
    return c;
  }
  throw ConfigError("unknown preset '" + std::string(name) +
                    "' (expected paper-default, gt-ablation or toy)");
}

std::vector<std::string> preset_names() { return {"paper-default", "gt-ablation", "toy"}; }

std::string to_string(train::LossReduction r) {
  return r == train::LossReduction::kPerPose ? "per-pose" : "per-joint";
}

train::LossReduction parse_loss_reduction(const std::string& name) {
  if (name == "per-pose") return train::LossReduction::kPerPose;
  if (name == "per-joint") return train::LossReduction::kPerJoint;
  throw ConfigError("unknown loss_reduction '" + name + "' (expected per-pose or per-joint)");
}

namespace {

bool apply_train_key(train::TrainConfig& t, const data::KvEntry& e) {
  const auto& k = e.key;
  if (k == "alpha") t.alpha = data::as_float(e);
  else if (k == "lr0") t.lr0 = data::as_float(e);
  else if (k == "decay") t.decay = data::as_float(e);
  else if (k == "decay_every") t.decay_every = data::as_count(e);
  else if (k == "epochs") t.epochs = data::as_count(e);
  else if (k == "batch_size") t.batch_size = data::as_count(e);
  else if (k == "seed") t.seed = static_cast<std::uint64_t>(data::as_count(e));
  else if (k == "loss_reduction") t.reduction = parse_loss_reduction(data::as_string(e));
  else return false;
  return true;
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  const auto doc = data::KvDocument::parse(text);
  RunConfig c;
  if (const auto* p = doc.find("preset")) c = preset(data::as_string(*p));
  for (const auto& e : doc.entries()) {
    if (e.key == "preset") continue;
    if (model::apply_model_key(c.model, e) || apply_train_key(c.train, e)) continue;
    if (e.key == "standardize") c.standardize = data::as_bool(e);
    else if (e.key == "data") c.data = data::as_string(e);
    else if (e.key == "out") c.out = data::as_string(e);
    else throw ConfigError("line " + std::to_string(e.line) + ": unknown config key '" + e.key + "'");
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_run_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

data::KvDocument to_document(const RunConfig& c) {
  data::KvDocument doc;
  doc.set("preset", c.preset);
  const auto model_doc = model::to_document(c.model);
  for (const auto& e : model_doc.entries()) doc.set(e.key, e.value);
  doc.set("alpha", c.train.alpha);
  doc.set("lr0", c.train.lr0);
  doc.set("decay", c.train.decay);
  doc.set("decay_every", static_cast<std::int64_t>(c.train.decay_every));
  doc.set("epochs", static_cast<std::int64_t>(c.train.epochs));
  doc.set("batch_size", static_cast<std::int64_t>(c.train.batch_size));
  doc.set("seed", static_cast<std::int64_t>(c.train.seed));
  doc.set("loss_reduction", to_string(c.train.reduction));
  doc.set("standardize", c.standardize);
  if (!c.data.empty()) doc.set("data", c.data);
  if (!c.out.empty()) doc.set("out", c.out);
  return doc;
}

}  // namespace mgt::cli
