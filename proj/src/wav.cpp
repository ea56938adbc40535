#include "mixgraph/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace mixgraph {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const std::string& s, std::size_t pos) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(s[pos]) |
                                    (static_cast<unsigned char>(s[pos + 1]) << 8));
}

std::uint32_t get_u32(const std::string& s, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[pos + static_cast<std::size_t>(i)]);
  return v;
}

constexpr std::uint16_t kFormatIeeeFloat = 3;

}  // namespace

void write_wav(const AudioBuffer& buffer, const std::string& path) {
  if (buffer.batch != 1) fail("write_wav: only single-source buffers (batch 1) can be written");
  if (buffer.channels != 2) fail("write_wav: only stereo buffers can be written");

  const std::uint32_t frames = static_cast<std::uint32_t>(buffer.length);
  const std::uint16_t channels = 2;
  const std::uint32_t rate = static_cast<std::uint32_t>(buffer.sample_rate);
  const std::uint32_t data_bytes = frames * channels * 4;

  std::string out;
  out.reserve(data_bytes + 64);
  out += "RIFF";
  put_u32(out, 4 + 8 + 16 + 8 + 4 + 8 + data_bytes);  // WAVE + fmt + fact + data
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, kFormatIeeeFloat);
  put_u16(out, channels);
  put_u32(out, rate);
  put_u32(out, rate * channels * 4);  // byte rate
  put_u16(out, channels * 4);         // block align
  put_u16(out, 32);                   // bits per sample
  out += "fact";
  put_u32(out, 4);
  put_u32(out, frames);
  out += "data";
  put_u32(out, data_bytes);
  for (long i = 0; i < buffer.length; ++i) {
    for (int c = 0; c < 2; ++c) {
      const float v = static_cast<float>(buffer.at(0, c, i));
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      put_u32(out, bits);
    }
  }

  std::ofstream file(path, std::ios::binary);
  if (!file) fail("write_wav: cannot open '" + path + "' for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) fail("write_wav: write to '" + path + "' failed");
}

AudioBuffer read_wav(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) fail("read_wav: cannot open '" + path + "'");
  std::string data((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

  if (data.size() < 12 || data.compare(0, 4, "RIFF") != 0 || data.compare(8, 4, "WAVE") != 0) {
    fail("read_wav: '" + path + "' is not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_pos = 0, data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const std::string id = data.substr(pos, 4);
    const std::uint32_t size = get_u32(data, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > data.size()) fail("read_wav: truncated chunk '" + id + "'");
    if (id == "fmt ") {
      if (size < 16) fail("read_wav: fmt chunk too small");
      format = get_u16(data, body);
      channels = get_u16(data, body + 2);
      rate = get_u32(data, body + 4);
      bits = get_u16(data, body + 14);
      have_fmt = true;
    } else if (id == "data") {
      data_pos = body;
      data_len = size;
    }
    pos = body + size + (size & 1);  // chunks are word-aligned
  }
  if (!have_fmt || data_pos == 0) fail("read_wav: missing fmt or data chunk");
  if (format != kFormatIeeeFloat || bits != 32) {
    fail("read_wav: unsupported encoding (need 32-bit float PCM)");
  }
  if (channels != 2) {
    fail("read_wav: unsupported channel count " + std::to_string(channels) + " (need 2)");
  }

  const std::size_t frames = data_len / (4 * channels);
  AudioBuffer buffer(1, 2, static_cast<long>(frames), static_cast<double>(rate));
  for (std::size_t i = 0; i < frames; ++i) {
    for (int c = 0; c < 2; ++c) {
      const std::uint32_t raw = get_u32(data, data_pos + (i * channels + static_cast<std::size_t>(c)) * 4);
      float v;
      std::memcpy(&v, &raw, 4);
      buffer.at(0, c, static_cast<long>(i)) = static_cast<double>(v);
    }
  }
  return buffer;
}

}  // namespace mixgraph
