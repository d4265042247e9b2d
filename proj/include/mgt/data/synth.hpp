#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mgt/data/dataset.hpp"

namespace mgt::data {

struct SynthOptions {
  std::size_t count = 32;
  std::size_t frames = 1;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;  // std of Gaussian noise on the 2D inputs
  double amplitude = 0.05;   // per-joint trajectory amplitude
  double max_yaw = 0.5;      // radians, initial heading range +/- max_yaw
  double yaw_rate = 0.05;    // radians/frame, heading drift range +/- yaw_rate
  std::string unit = "m";
};

// Rest pose in metres. The built-in Human3.6M skeleton gets an anatomical
// layout; any other skeleton a seeded tree layout with 0.25 m bones.
std::vector<double> rest_pose(const graph::SkeletonGraph& skeleton);

// Each sample perturbs the rest pose with smooth seeded per-joint sinusoids
// and a drifting heading over T frames, projects every frame
// orthographically onto (x, y), and adds noise to the 2D inputs. The target is
// the final frame's root-relative 3D pose.
PoseDataset synthesize(const graph::SkeletonGraph& skeleton, const SynthOptions& opts);
PoseDataset synthesize(const graph::SkeletonGraph& skeleton, std::size_t count,
                       std::size_t frames, std::uint64_t seed, double noise_sigma);

}  // namespace mgt::data
