#include "mgt/data/binary.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "mgt/error.hpp"

namespace mgt::data {

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::f64(double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

void ByteWriter::bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }

void ByteWriter::prefixed(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  bytes(s);
}

void ByteReader::need(std::size_t n, std::string_view context) const {
  if (remaining() < n) {
    throw FormatError("unexpected end of file at " + std::string(context) + " (byte offset " +
                          std::to_string(pos_) + ", needed " + std::to_string(n) +
                          " bytes, " + std::to_string(remaining()) + " left)",
                      pos_);
  }
}

std::uint32_t ByteReader::u32(std::string_view context) {
  need(4, context);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

float ByteReader::f32(std::string_view context) {
  return std::bit_cast<float>(u32(context));
}

double ByteReader::f64(std::string_view context) {
  need(8, context);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return std::bit_cast<double>(v);
}

std::string ByteReader::bytes(std::size_t n, std::string_view context) {
  need(n, context);
  std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
  pos_ += n;
  return s;
}

std::string ByteReader::prefixed(std::string_view context) {
  const auto n = u32(context);
  return bytes(n, context);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ValidationError("write to '" + path + "' failed");
}

}  // namespace mgt::data
