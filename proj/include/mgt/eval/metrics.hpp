#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "mgt/ad/tensor.hpp"

namespace mgt::eval {

using ad::Tensor;

// Mean over joints of the Euclidean distance between rows of two N x 3 poses.
double mpjpe(const Tensor& pred, const Tensor& gt);

// Per-joint Euclidean distances.
std::vector<double> joint_errors(const Tensor& pred, const Tensor& gt);

struct ProcrustesOptions {
  bool allow_reflection = false;
};

struct SimilarityTransform {
  double scale = 1.0;
  double rotation[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  double translation[3] = {0, 0, 0};
};

// Similarity transform s R x + t minimizing the squared distance from pred to
// gt (orthogonal Procrustes on centered point sets via SVD of the
// cross-covariance). R is a proper rotation unless reflections are allowed.
// Throws NumericError when gt has all joints coincident.
SimilarityTransform procrustes_fit(const Tensor& pred, const Tensor& gt,
                                   const ProcrustesOptions& opts = {});
Tensor apply(const SimilarityTransform& tf, const Tensor& pose);
Tensor procrustes_align(const Tensor& pred, const Tensor& gt,
                        const ProcrustesOptions& opts = {});

double pa_mpjpe(const Tensor& pred, const Tensor& gt, const ProcrustesOptions& opts = {});

// Fraction of joints over all poses whose error is <= threshold.
double pck(const std::vector<Tensor>& preds, const std::vector<Tensor>& gts, double threshold);

// 0, 5, ..., 150.
std::vector<double> default_auc_grid();

// Mean PCK over an increasing threshold grid.
double auc(const std::vector<Tensor>& preds, const std::vector<Tensor>& gts,
           const std::vector<double>& thresholds);

// 150 mm expressed in `unit` ("mm", "cm", "m"); 150 for unknown units.
double default_pck_threshold(const std::string& unit);
// default_auc_grid() rescaled the same way.
std::vector<double> auc_grid_for_unit(const std::string& unit);

struct MetricRow {
  std::string action;
  double mpjpe = 0.0;
  double pa_mpjpe = 0.0;
  double pck = 0.0;
  double auc = 0.0;
  std::size_t count = 0;
};

struct MetricReport {
  std::string unit;
  std::vector<MetricRow> per_action;  // sorted by action name
  MetricRow overall;                  // action "all"
};

struct EvalSettings {
  double pck_threshold = 150.0;
  std::vector<double> auc_grid = default_auc_grid();
  ProcrustesOptions procrustes;
};

MetricReport evaluate(const std::vector<Tensor>& preds, const std::vector<Tensor>& gts,
                      const std::vector<std::string>& actions, const std::string& unit,
                      const EvalSettings& settings);

// `action,mpjpe,pa_mpjpe,pck,auc,n`, per action then "all".
void write_csv(std::ostream& os, const MetricReport& report);
void write_table(std::ostream& os, const MetricReport& report);

}  // namespace mgt::eval
