#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mgt/ad/tensor.hpp"
#include "mgt/graph/skeleton.hpp"

namespace mgt::data {

using ad::Tensor;

struct PoseSample {
  Tensor input;   // N x 2 x T
  Tensor target;  // N x 3, root-relative
  std::string action;
};

// Paired 2D sequences and 3D targets on one skeleton. Use make() or load to
// get a validated dataset.
struct PoseDataset {
  graph::SkeletonGraph skeleton = graph::SkeletonGraph::human36m();
  std::string unit = "mm";
  std::size_t frames = 1;
  std::vector<PoseSample> samples;

  std::size_t joints() const { return skeleton.num_joints(); }
  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  // Checks shapes, finiteness, connectivity, and root-relative targets.
  // Throws ValidationError naming the offending record.
  void validate() const;
};

// Subtracts the root joint from every target row.
Tensor root_relative(const Tensor& target, std::size_t root);

// Binary pose file, all integers little-endian:
//   "MGTP" u32 version=1 u32 N u32 T u32 count
//   u32 len + unit (UTF-8)   u32 len + skeleton document (UTF-8)
//   per sample: u32 len + action, N*2*T f32 (joint, coordinate, frame),
//               N*3 f32
std::vector<std::uint8_t> encode_dataset(const PoseDataset& ds);
// Fully validated, root-centered result or a FormatError/ValidationError.
PoseDataset decode_dataset(const std::vector<std::uint8_t>& bytes);

void save_dataset(const std::string& path, const PoseDataset& ds);
PoseDataset load_dataset(const std::string& path);

// Keeps the last `frames` frames of every input sequence.
PoseDataset last_frames(const PoseDataset& ds, std::size_t frames);

}  // namespace mgt::data
