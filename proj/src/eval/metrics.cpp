#include "mgt/eval/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <map>

#include "mgt/error.hpp"

namespace mgt::eval {

namespace {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

void require_pose_pair(const Tensor& pred, const Tensor& gt) {
  if (pred.rank() != 2 || pred.dim(1) != 3 || pred.shape() != gt.shape()) {
    throw DimensionError("pose shapes must both be N x 3, got " + ad::to_string(pred.shape()) +
                         " and " + ad::to_string(gt.shape()));
  }
}

Points to_points(const Tensor& t) {
  return Eigen::Map<const Points>(t.data().data(), static_cast<Eigen::Index>(t.dim(0)), 3);
}

}  // namespace

std::vector<double> joint_errors(const Tensor& pred, const Tensor& gt) {
  require_pose_pair(pred, gt);
  const auto p = pred.data(), g = gt.data();
  std::vector<double> err(pred.dim(0));
  for (std::size_t j = 0; j < err.size(); ++j) {
    const double dx = p[3 * j] - g[3 * j];
    const double dy = p[3 * j + 1] - g[3 * j + 1];
    const double dz = p[3 * j + 2] - g[3 * j + 2];
    err[j] = std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  return err;
}

double mpjpe(const Tensor& pred, const Tensor& gt) {
  const auto err = joint_errors(pred, gt);
  if (err.empty()) throw DimensionError("mpjpe of an empty pose");
  double s = 0.0;
  for (double e : err) s += e;
  return s / static_cast<double>(err.size());
}

SimilarityTransform procrustes_fit(const Tensor& pred, const Tensor& gt,
                                   const ProcrustesOptions& opts) {
  require_pose_pair(pred, gt);
  const Points x = to_points(pred);
  const Points y = to_points(gt);
  const Eigen::RowVector3d mu_x = x.colwise().mean();
  const Eigen::RowVector3d mu_y = y.colwise().mean();
  const Points xc = x.rowwise() - mu_x;
  const Points yc = y.rowwise() - mu_y;
  const double var_y = yc.squaredNorm();
  if (!(var_y > 0.0)) throw NumericError("procrustes: ground-truth joints are all coincident");
  const double var_x = xc.squaredNorm();

  SimilarityTransform tf;
  Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
  double s = 0.0;
  if (var_x > 0.0) {
    // Maximize tr(R^T Y^T X): with Y^T X = U S V^T, R = U D V^T.
    const Eigen::Matrix3d cov = yc.transpose() * xc;
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Vector3d d = Eigen::Vector3d::Ones();
    if (!opts.allow_reflection && (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0) {
      d(2) = -1.0;
    }
    rot = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();
    s = svd.singularValues().dot(d) / var_x;
  }
  const Eigen::RowVector3d t = mu_y - s * mu_x * rot.transpose();
  tf.scale = s;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) tf.rotation[i][j] = rot(i, j);
    tf.translation[i] = t(i);
  }
  return tf;
}

Tensor apply(const SimilarityTransform& tf, const Tensor& pose) {
  if (pose.rank() != 2 || pose.dim(1) != 3) {
    throw DimensionError("apply: pose must be N x 3, got " + ad::to_string(pose.shape()));
  }
  const auto p = pose.data();
  std::vector<double> out(p.size());
  for (std::size_t j = 0; j < pose.dim(0); ++j)
    for (int i = 0; i < 3; ++i) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += tf.rotation[i][k] * p[3 * j + k];
      out[3 * j + i] = tf.scale * acc + tf.translation[i];
    }
  return Tensor(pose.shape(), std::move(out));
}

Tensor procrustes_align(const Tensor& pred, const Tensor& gt, const ProcrustesOptions& opts) {
  return apply(procrustes_fit(pred, gt, opts), pred);
}

double pa_mpjpe(const Tensor& pred, const Tensor& gt, const ProcrustesOptions& opts) {
  return mpjpe(procrustes_align(pred, gt, opts), gt);
}

namespace {

std::vector<double> all_errors(const std::vector<Tensor>& preds, const std::vector<Tensor>& gts) {
  if (preds.size() != gts.size()) {
    throw DimensionError("got " + std::to_string(preds.size()) + " predictions for " +
                         std::to_string(gts.size()) + " ground-truth poses");
  }
  std::vector<double> errs;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    auto e = joint_errors(preds[i], gts[i]);
    errs.insert(errs.end(), e.begin(), e.end());
  }
  return errs;
}

double fraction_within(const std::vector<double>& errs, double threshold) {
  if (errs.empty()) return 0.0;
  const auto hits = std::count_if(errs.begin(), errs.end(),
                                  [threshold](double e) { return e <= threshold; });
  return static_cast<double>(hits) / static_cast<double>(errs.size());
}

}  // namespace

double pck(const std::vector<Tensor>& preds, const std::vector<Tensor>& gts, double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("pck threshold must be positive");
  return fraction_within(all_errors(preds, gts), threshold);
}

std::vector<double> default_auc_grid() {
  std::vector<double> grid;
  for (int t = 0; t <= 150; t += 5) grid.push_back(t);
  return grid;
}

double auc(const std::vector<Tensor>& preds, const std::vector<Tensor>& gts,
           const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw ConfigError("auc: empty threshold grid");
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > thresholds[i - 1])) {
      throw ConfigError("auc: threshold grid must be strictly increasing");
    }
  }
  const auto errs = all_errors(preds, gts);
  double acc = 0.0;
  for (double t : thresholds) acc += fraction_within(errs, t);
  return acc / static_cast<double>(thresholds.size());
}

namespace {
double millimetres_per_unit(const std::string& unit) {
  if (unit == "mm") return 1.0;
  if (unit == "cm") return 10.0;
  if (unit == "m") return 1000.0;
  return 1.0;
}
}  // namespace

double default_pck_threshold(const std::string& unit) {
  return 150.0 / millimetres_per_unit(unit);
}

std::vector<double> auc_grid_for_unit(const std::string& unit) {
  auto grid = default_auc_grid();
  for (auto& t : grid) t /= millimetres_per_unit(unit);
  return grid;
}

MetricReport evaluate(const std::vector<Tensor>& preds, const std::vector<Tensor>& gts,
                      const std::vector<std::string>& actions, const std::string& unit,
                      const EvalSettings& settings) {
  if (preds.size() != gts.size() || preds.size() != actions.size()) {
    throw DimensionError("evaluate: predictions, targets, and actions differ in length");
  }
  if (preds.empty()) throw ValidationError("evaluate: no samples");

  auto summarize = [&](const std::string& name, const std::vector<std::size_t>& idx) {
    MetricRow row;
    row.action = name;
    row.count = idx.size();
    std::vector<Tensor> p, g;
    for (auto i : idx) {
      row.mpjpe += mpjpe(preds[i], gts[i]);
      row.pa_mpjpe += pa_mpjpe(preds[i], gts[i], settings.procrustes);
      p.push_back(preds[i]);
      g.push_back(gts[i]);
    }
    row.mpjpe /= static_cast<double>(idx.size());
    row.pa_mpjpe /= static_cast<double>(idx.size());
    row.pck = pck(p, g, settings.pck_threshold);
    row.auc = auc(p, g, settings.auc_grid);
    return row;
  };

  std::map<std::string, std::vector<std::size_t>> groups;
  std::vector<std::size_t> everything;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    groups[actions[i]].push_back(i);
    everything.push_back(i);
  }
  MetricReport report;
  report.unit = unit;
  for (const auto& [name, idx] : groups) report.per_action.push_back(summarize(name, idx));
  report.overall = summarize("all", everything);
  return report;
}

void write_csv(std::ostream& os, const MetricReport& report) {
  os << "action,mpjpe,pa_mpjpe,pck,auc,n\n";
  auto line = [&](const MetricRow& r) {
    os << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", r.action, r.mpjpe, r.pa_mpjpe,
                      r.pck, r.auc, r.count);
  };
  for (const auto& r : report.per_action) line(r);
  line(report.overall);
}

void write_table(std::ostream& os, const MetricReport& report) {
  const std::string u = report.unit.empty() ? "units" : report.unit;
  os << fmt::format("{:<16} {:>12} {:>12} {:>8} {:>8} {:>7}\n", "action", "MPJPE(" + u + ")",
                    "PA-MPJPE", "PCK", "AUC", "n");
  auto line = [&](const MetricRow& r) {
    os << fmt::format("{:<16} {:>12.3f} {:>12.3f} {:>8.4f} {:>8.4f} {:>7}\n", r.action, r.mpjpe,
                      r.pa_mpjpe, r.pck, r.auc, r.count);
  };
  for (const auto& r : report.per_action) line(r);
  line(report.overall);
}

}  // namespace mgt::eval
