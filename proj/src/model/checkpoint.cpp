#include "mgt/model/checkpoint.hpp"

#include <map>

#include "mgt/data/binary.hpp"
#include "mgt/error.hpp"

namespace mgt::model {

namespace {

constexpr char kMagic[4] = {'M', 'G', 'T', 'C'};
constexpr std::uint32_t kVersion = 1;

std::int64_t as_i64(std::size_t v) { return static_cast<std::int64_t>(v); }

}  // namespace

data::KvDocument to_document(const ModelConfig& c) {
  data::KvDocument doc;
  doc.set("joints", as_i64(c.joints));
  doc.set("frames", as_i64(c.frames));
  doc.set("features", as_i64(c.features));
  doc.set("layers", as_i64(c.layers));
  doc.set("heads", as_i64(c.heads));
  doc.set("max_hops", as_i64(c.max_hops));
  doc.set("dropout", c.dropout);
  doc.set("dilation", as_i64(c.dilation));
  doc.set("kernel_half_width", as_i64(c.kernel_half_width));
  doc.set("dilated_conv", c.dilated_conv);
  doc.set("gconv", to_string(c.gconv));
  doc.set("layer_norm_eps", c.layer_norm_eps);
  return doc;
}

bool apply_model_key(ModelConfig& c, const data::KvEntry& e) {
  const auto& k = e.key;
  if (k == "joints") c.joints = data::as_count(e);
  else if (k == "frames") c.frames = data::as_count(e);
  else if (k == "features") c.features = data::as_count(e);
  else if (k == "layers") c.layers = data::as_count(e);
  else if (k == "heads") c.heads = data::as_count(e);
  else if (k == "max_hops") c.max_hops = data::as_count(e);
  else if (k == "dropout") c.dropout = data::as_float(e);
  else if (k == "dilation") c.dilation = data::as_count(e);
  else if (k == "kernel_half_width") c.kernel_half_width = data::as_count(e);
  else if (k == "dilated_conv") c.dilated_conv = data::as_bool(e);
  else if (k == "gconv") c.gconv = parse_gconv_kind(data::as_string(e));
  else if (k == "layer_norm_eps") c.layer_norm_eps = data::as_float(e);
  else return false;
  return true;
}

std::vector<std::uint8_t> encode_checkpoint(const MgtNet& net,
                                            const data::Standardizer& standardizer,
                                            const std::string& unit) {
  data::ByteWriter w;
  w.bytes(std::string_view(kMagic, 4));
  w.u32(kVersion);
  w.prefixed(to_document(net.config()).serialize());
  w.prefixed(graph::to_document(net.skeleton()));
  w.prefixed(unit);
  w.u32(static_cast<std::uint32_t>(standardizer.mean().size()));
  for (double v : standardizer.mean()) w.f64(v);
  for (double v : standardizer.stddev()) w.f64(v);
  const auto params = net.parameters();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    w.prefixed(p.name);
    w.u32(static_cast<std::uint32_t>(p.value.rank()));
    for (auto d : p.value.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (double v : p.value.data()) w.f64(v);
  }
  return w.buffer();
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  data::ByteReader r(bytes);
  if (r.remaining() < 4 || r.bytes(4, "header") != std::string_view(kMagic, 4)) {
    throw FormatError("bad magic: not a checkpoint (expected 'MGTC' at byte offset 0)", 0);
  }
  if (const auto v = r.u32("header"); v != kVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(v), 4);
  }

  ModelConfig config;
  const auto config_offset = r.offset();
  try {
    const auto doc = data::KvDocument::parse(r.prefixed("config"));
    for (const auto& e : doc.entries()) {
      if (!apply_model_key(config, e)) throw ConfigError("unknown config key '" + e.key + "'");
    }
    config.validate();
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("invalid config block: ") + e.what(), config_offset);
  }
  const auto skeleton_offset = r.offset();
  const auto skeleton_text = r.prefixed("skeleton");
  graph::SkeletonGraph skeleton = [&] {
    try {
      auto g = graph::parse_skeleton(skeleton_text);
      g.require_connected();
      return g;
    } catch (const Error& e) {
      throw FormatError(std::string("invalid skeleton block: ") + e.what(), skeleton_offset);
    }
  }();
  if (skeleton.num_joints() != config.joints) {
    throw FormatError("config declares " + std::to_string(config.joints) +
                          " joints but the skeleton has " +
                          std::to_string(skeleton.num_joints()),
                      skeleton_offset);
  }
  std::string unit = r.prefixed("unit");

  const auto s = r.u32("standardizer");
  std::vector<double> mean(s), stddev(s);
  for (auto& v : mean) v = r.f64("standardizer");
  for (auto& v : stddev) v = r.f64("standardizer");
  if (s != 0 && s != 2) {
    throw FormatError("standardizer has " + std::to_string(s) + " entries, expected 0 or 2",
                      r.offset());
  }

  MgtNet net(config, std::move(skeleton), 0);
  std::map<std::string, Tensor> slots;
  for (auto& p : net.parameters()) slots.emplace(p.name, p.value);

  const auto count = r.u32("parameter table");
  std::map<std::string, bool> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto at = r.offset();
    const std::string ctx = "parameter " + std::to_string(i);
    auto name = r.prefixed(ctx);
    const auto rank = r.u32(ctx);
    ad::Shape shape(rank);
    for (auto& d : shape) d = r.u32(ctx);
    auto it = slots.find(name);
    if (it == slots.end()) throw FormatError("unknown parameter '" + name + "'", at);
    if (seen[name]) throw FormatError("duplicate parameter '" + name + "'", at);
    seen[name] = true;
    if (shape != it->second.shape()) {
      throw FormatError("parameter '" + name + "' has shape " + ad::to_string(shape) +
                            ", config expects " + ad::to_string(it->second.shape()),
                        at);
    }
    auto dst = it->second.mutable_data();
    for (auto& v : dst) v = r.f64(ctx);
  }
  for (const auto& [name, t] : slots) {
    if (!seen.count(name)) throw FormatError("missing parameter '" + name + "'", r.offset());
  }
  if (r.remaining() != 0) {
    throw FormatError(std::to_string(r.remaining()) + " trailing bytes after parameter table",
                      r.offset());
  }
  return {std::move(net),
          s ? data::Standardizer(std::move(mean), std::move(stddev)) : data::Standardizer{},
          std::move(unit)};
}

void save_checkpoint(const std::string& path, const MgtNet& net,
                     const data::Standardizer& standardizer, const std::string& unit) {
  data::write_file(path, encode_checkpoint(net, standardizer, unit));
}

Checkpoint load_checkpoint(const std::string& path) {
  try {
    return decode_checkpoint(data::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what(), e.offset());
  }
}

}  // namespace mgt::model
