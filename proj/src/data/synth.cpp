#include "mgt/data/synth.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <random>

#include "mgt/error.hpp"

namespace mgt::data {

namespace {

const std::vector<double> kHuman36mRest = {
    0.00,  0.00,  0.00,   // pelvis
    -0.13, 0.00,  0.00,   // r_hip
    -0.13, -0.44, 0.03,   // r_knee
    -0.13, -0.88, 0.00,   // r_ankle
    0.13,  0.00,  0.00,   // l_hip
    0.13,  -0.44, 0.03,   // l_knee
    0.13,  -0.88, 0.00,   // l_ankle
    0.00,  0.23,  -0.02,  // spine
    0.00,  0.48,  -0.03,  // thorax
    0.00,  0.58,  0.00,   // neck
    0.00,  0.70,  0.02,   // head
    0.17,  0.45,  -0.02,  // l_shoulder
    0.20,  0.18,  0.02,   // l_elbow
    0.22,  -0.07, 0.10,   // l_wrist
    -0.17, 0.45,  -0.02,  // r_shoulder
    -0.20, 0.18,  0.02,   // r_elbow
    -0.22, -0.07, 0.10,   // r_wrist
};

}  // namespace

std::vector<double> rest_pose(const graph::SkeletonGraph& skeleton) {
  if (skeleton == graph::SkeletonGraph::human36m()) return kHuman36mRest;

  const std::size_t n = skeleton.num_joints();
  std::vector<double> pose(3 * n, 0.0);
  std::vector<bool> placed(n, false);
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  const auto adj = skeleton.neighbors();
  std::queue<std::size_t> frontier;
  frontier.push(skeleton.root());
  placed[skeleton.root()] = true;
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop();
    for (auto v : adj[u]) {
      if (placed[v]) continue;
      double dir[3] = {normal(rng), normal(rng), normal(rng)};
      const double len = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
      for (int c = 0; c < 3; ++c) pose[3 * v + c] = pose[3 * u + c] + 0.25 * dir[c] / len;
      placed[v] = true;
      frontier.push(v);
    }
  }
  return pose;
}

PoseDataset synthesize(const graph::SkeletonGraph& skeleton, const SynthOptions& opts) {
  if (opts.count == 0) throw ConfigError("synthesize: count must be at least 1");
  if (opts.frames == 0) throw ConfigError("synthesize: frames must be at least 1");
  if (opts.noise_sigma < 0.0) throw ConfigError("synthesize: noise_sigma must be >= 0");
  skeleton.require_connected();

  const std::size_t n = skeleton.num_joints();
  const std::size_t t_count = opts.frames;
  const std::size_t root = skeleton.root();
  const auto rest = rest_pose(skeleton);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit01(rng); };

  PoseDataset ds;
  ds.skeleton = skeleton;
  ds.unit = opts.unit;
  ds.frames = t_count;
  ds.samples.reserve(opts.count);
  for (std::size_t i = 0; i < opts.count; ++i) {
    const double yaw0 = uniform(-opts.max_yaw, opts.max_yaw);
    const double yaw_rate = uniform(-opts.yaw_rate, opts.yaw_rate);
    struct Motion {
      double phase, freq, dir[3];
    };
    std::vector<Motion> motion(n);
    for (auto& m : motion) {
      m.phase = uniform(0.0, 2.0 * std::numbers::pi);
      m.freq = uniform(0.05, 0.3);
      double len = 0.0;
      for (auto& d : m.dir) {
        d = normal(rng);
        len += d * d;
      }
      len = std::sqrt(len);
      for (auto& d : m.dir) d /= len;
    }

    std::vector<double> input(n * 2 * t_count);
    std::vector<double> target(n * 3);
    for (std::size_t t = 0; t < t_count; ++t) {
      const double yaw = yaw0 + yaw_rate * static_cast<double>(t);
      const double cy = std::cos(yaw), sy = std::sin(yaw);
      for (std::size_t j = 0; j < n; ++j) {
        double p[3];
        const double wave =
            j == root ? 0.0
                      : opts.amplitude *
                            std::sin(motion[j].phase + motion[j].freq * static_cast<double>(t));
        for (int c = 0; c < 3; ++c) p[c] = rest[3 * j + c] + wave * motion[j].dir[c];
        // Rotation about the vertical (y) axis.
        const double x = cy * p[0] + sy * p[2];
        const double y = p[1];
        const double z = -sy * p[0] + cy * p[2];
        input[(j * 2 + 0) * t_count + t] = x;
        input[(j * 2 + 1) * t_count + t] = y;
        if (t + 1 == t_count) {
          target[3 * j] = x;
          target[3 * j + 1] = y;
          target[3 * j + 2] = z;
        }
      }
    }
    if (opts.noise_sigma > 0.0) {
      for (auto& v : input) v += opts.noise_sigma * normal(rng);
    }
    PoseSample s;
    s.input = Tensor({n, 2, t_count}, std::move(input));
    s.target = root_relative(Tensor({n, 3}, std::move(target)), root);
    s.action = "motion" + std::to_string(i % 4);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

PoseDataset synthesize(const graph::SkeletonGraph& skeleton, std::size_t count,
                       std::size_t frames, std::uint64_t seed, double noise_sigma) {
  SynthOptions opts;
  opts.count = count;
  opts.frames = frames;
  opts.seed = seed;
  opts.noise_sigma = noise_sigma;
  return synthesize(skeleton, opts);
}

}  // namespace mgt::data
