#include "mgt/data/dataset.hpp"

#include <cmath>

#include "mgt/data/binary.hpp"
#include "mgt/error.hpp"

namespace mgt::data {

namespace {

constexpr char kMagic[4] = {'M', 'G', 'T', 'P'};
constexpr std::uint32_t kVersion = 1;

std::string record(std::size_t i) { return "record " + std::to_string(i); }

}  // namespace

Tensor root_relative(const Tensor& target, std::size_t root) {
  const std::size_t n = target.dim(0);
  auto v = target.data();
  std::vector<double> out(v.begin(), v.end());
  const double r[3] = {v[3 * root], v[3 * root + 1], v[3 * root + 2]};
  for (std::size_t j = 0; j < n; ++j)
    for (int c = 0; c < 3; ++c) out[3 * j + c] -= r[c];
  return Tensor({n, 3}, std::move(out));
}

void PoseDataset::validate() const {
  skeleton.require_connected();
  if (frames == 0) throw ValidationError("dataset frame count must be positive");
  const std::size_t n = joints();
  const ad::Shape in_shape{n, 2, frames};
  const ad::Shape out_shape{n, 3};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.input.shape() != in_shape || s.target.shape() != out_shape) {
      throw ValidationError(record(i) + ": shapes " + ad::to_string(s.input.shape()) + " / " +
                            ad::to_string(s.target.shape()) + " do not match header N=" +
                            std::to_string(n) + ", T=" + std::to_string(frames));
    }
    for (const Tensor* t : {&s.input, &s.target}) {
      for (double v : t->data()) {
        if (!std::isfinite(v)) throw ValidationError(record(i) + ": non-finite coordinate");
      }
    }
    for (int c = 0; c < 3; ++c) {
      if (s.target.data()[3 * skeleton.root() + c] != 0.0) {
        throw ValidationError(record(i) + ": target is not root-relative");
      }
    }
  }
}

std::vector<std::uint8_t> encode_dataset(const PoseDataset& ds) {
  ds.validate();
  ByteWriter w;
  w.bytes(std::string_view(kMagic, 4));
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(ds.joints()));
  w.u32(static_cast<std::uint32_t>(ds.frames));
  w.u32(static_cast<std::uint32_t>(ds.size()));
  w.prefixed(ds.unit);
  w.prefixed(graph::to_document(ds.skeleton));
  for (const auto& s : ds.samples) {
    w.prefixed(s.action);
    for (double v : s.input.data()) w.f32(static_cast<float>(v));
    for (double v : s.target.data()) w.f32(static_cast<float>(v));
  }
  return w.buffer();
}

PoseDataset decode_dataset(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  if (r.remaining() < 4 || r.bytes(4, "header") != std::string_view(kMagic, 4)) {
    throw FormatError("bad magic: not a pose file (expected 'MGTP' at byte offset 0)", 0);
  }
  const auto version = r.u32("header");
  if (version != kVersion) {
    throw FormatError("unsupported pose file version " + std::to_string(version) +
                          " at byte offset 4 (expected 1)",
                      4);
  }
  const auto n = r.u32("header");
  const auto t = r.u32("header");
  const auto count = r.u32("header");
  if (n == 0 || t == 0) {
    throw FormatError("shape inconsistency: header declares N=" + std::to_string(n) +
                          ", T=" + std::to_string(t),
                      8);
  }

  PoseDataset ds;
  ds.frames = t;
  ds.unit = r.prefixed("header unit");
  const std::size_t skeleton_offset = r.offset();
  const auto doc = r.prefixed("header skeleton");
  try {
    ds.skeleton = graph::parse_skeleton(doc);
    ds.skeleton.require_connected();
  } catch (const ValidationError& e) {
    throw FormatError(std::string("invalid embedded skeleton at byte offset ") +
                          std::to_string(skeleton_offset) + ": " + e.what(),
                      skeleton_offset);
  }
  if (ds.skeleton.num_joints() != n) {
    throw FormatError("shape inconsistency: header declares N=" + std::to_string(n) +
                          " but the skeleton has " + std::to_string(ds.skeleton.num_joints()) +
                          " joints",
                      skeleton_offset);
  }

  const std::size_t in_count = std::size_t{n} * 2 * t;
  const std::size_t out_count = std::size_t{n} * 3;
  // The header count is not trusted for allocation; a lying count surfaces
  // as a truncated record below.
  const std::size_t min_record = 4 + 4 * (in_count + out_count);
  ds.samples.reserve(std::min<std::size_t>(count, r.remaining() / min_record + 1));
  for (std::size_t i = 0; i < count; ++i) {
    const std::string ctx = record(i);
    PoseSample s;
    s.action = r.prefixed(ctx);
    std::vector<double> in(in_count), out(out_count);
    for (auto& v : in) v = r.f32(ctx);
    for (auto& v : out) v = r.f32(ctx);
    for (const auto* buf : {&in, &out}) {
      for (double v : *buf) {
        if (!std::isfinite(v)) {
          throw FormatError("non-finite value in " + ctx + " (ending at byte offset " +
                                std::to_string(r.offset()) + ")",
                            r.offset());
        }
      }
    }
    s.input = Tensor({n, 2, t}, std::move(in));
    s.target = root_relative(Tensor({n, 3}, std::move(out)), ds.skeleton.root());
    ds.samples.push_back(std::move(s));
  }
  if (r.remaining() != 0) {
    throw FormatError("shape inconsistency: " + std::to_string(r.remaining()) +
                          " trailing bytes after " + std::to_string(count) +
                          " records at byte offset " + std::to_string(r.offset()),
                      r.offset());
  }
  ds.validate();
  return ds;
}

void save_dataset(const std::string& path, const PoseDataset& ds) {
  write_file(path, encode_dataset(ds));
}

PoseDataset load_dataset(const std::string& path) {
  const auto bytes = read_file(path);
  try {
    return decode_dataset(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what(), e.offset());
  }
}

PoseDataset last_frames(const PoseDataset& ds, std::size_t frames) {
  if (frames == 0 || frames > ds.frames) {
    throw ConfigError("cannot take " + std::to_string(frames) + " frames from sequences of " +
                      std::to_string(ds.frames));
  }
  PoseDataset out;
  out.skeleton = ds.skeleton;
  out.unit = ds.unit;
  out.frames = frames;
  const std::size_t n = ds.joints(), t0 = ds.frames - frames;
  for (const auto& s : ds.samples) {
    std::vector<double> in(n * 2 * frames);
    auto v = s.input.data();
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t t = 0; t < frames; ++t)
          in[(j * 2 + c) * frames + t] = v[(j * 2 + c) * ds.frames + t0 + t];
    out.samples.push_back({Tensor({n, 2, frames}, std::move(in)), s.target, s.action});
  }
  return out;
}

}  // namespace mgt::data
