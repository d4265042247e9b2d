#include "mgt/train/trainer.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mgt/ad/ops.hpp"
#include "mgt/error.hpp"
#include "mgt/eval/metrics.hpp"
#include "mgt/model/checkpoint.hpp"

namespace mgt::train {

void TrainConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError(fmt::format("alpha must lie in [0, 1], got {}", alpha));
  }
  if (!(lr0 > 0.0)) throw ConfigError(fmt::format("lr0 must be positive, got {}", lr0));
  if (!(decay > 0.0 && decay <= 1.0)) {
    throw ConfigError(fmt::format("decay must lie in (0, 1], got {}", decay));
  }
  if (decay_every == 0) throw ConfigError("decay_every must be positive");
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
}

double lr_at(const TrainConfig& c, std::size_t epoch) {
  return c.lr0 * std::pow(c.decay, static_cast<double>(epoch / c.decay_every));
}

std::string history_csv_header() { return "epoch,lr,train_loss,eval_mpjpe,eval_pa_mpjpe"; }

std::string history_csv_row(const EpochRecord& r) {
  return fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}", r.epoch, r.lr, r.train_loss,
                     r.eval_mpjpe, r.eval_pa_mpjpe);
}

std::vector<ad::Tensor> predict(const model::MgtNet& net, const data::PoseDataset& ds) {
  std::vector<ad::Tensor> out;
  out.reserve(ds.size());
  for (const auto& s : ds.samples) out.push_back(net.forward(s.input).detach());
  return out;
}

FitScore score(const model::MgtNet& net, const data::PoseDataset& ds) {
  if (ds.empty()) throw ValidationError("cannot score an empty dataset");
  FitScore f;
  for (const auto& s : ds.samples) {
    const auto pred = net.forward(s.input).detach();
    f.mpjpe += eval::mpjpe(pred, s.target);
    f.pa_mpjpe += eval::pa_mpjpe(pred, s.target);
  }
  f.mpjpe /= static_cast<double>(ds.size());
  f.pa_mpjpe /= static_cast<double>(ds.size());
  return f;
}

std::vector<EpochRecord> train(model::MgtNet& net, const data::PoseDataset& ds,
                               const TrainConfig& config, const TrainOptions& opts) {
  config.validate();
  if (ds.empty()) throw ValidationError("training set is empty");
  const auto& mc = net.config();
  if (ds.joints() != mc.joints || ds.frames != mc.frames) {
    throw ValidationError(fmt::format("dataset has N={}, T={} but the model expects N={}, T={}",
                                      ds.joints(), ds.frames, mc.joints, mc.frames));
  }
  const data::PoseDataset& eval_set = opts.eval_set ? *opts.eval_set : ds;

  ad::Rng shuffle_rng(config.seed);
  ad::Rng dropout_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  model::ForwardOptions fwd;
  fwd.train = true;
  fwd.rng = &dropout_rng;

  const auto params = net.parameters();
  AmsGradState state;
  std::vector<std::size_t> order(ds.size());
  std::vector<EpochRecord> history;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = lr_at(config, epoch);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      try {
        std::vector<ad::Tensor> preds, targets;
        for (std::size_t i = start; i < end; ++i) {
          const auto& s = ds.samples[order[i]];
          preds.push_back(net.forward(s.input, fwd));
          targets.push_back(s.target);
        }
        const auto loss =
            elastic_loss(ad::stack(preds), ad::stack(targets), config.alpha, config.reduction);
        const double value = loss.item();
        if (!std::isfinite(value)) throw NumericError("loss is " + std::to_string(value));
        for (const auto& p : params) ad::Tensor(p.value).zero_grad();
        ad::backward(loss);
        amsgrad_step(state, params, lr);
        loss_sum += value * static_cast<double>(end - start);
      } catch (const NumericError& e) {
        throw DivergenceError(fmt::format("diverged at epoch {}, batch {}: {}", epoch,
                                          batch_index, e.what()),
                              epoch, batch_index);
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.train_loss = loss_sum / static_cast<double>(ds.size());
    const auto fit = score(net, eval_set);
    rec.eval_mpjpe = fit.mpjpe;
    rec.eval_pa_mpjpe = fit.pa_mpjpe;
    spdlog::debug("epoch {} lr {:.3g} loss {:.6g} mpjpe {:.6g}", epoch, lr, rec.train_loss,
                  rec.eval_mpjpe);
    history.push_back(rec);
    if (opts.on_epoch) opts.on_epoch(rec);
  }

  if (!opts.checkpoint_path.empty()) {
    model::save_checkpoint(opts.checkpoint_path, net, opts.standardizer, ds.unit);
  }
  return history;
}

}  // namespace mgt::train
