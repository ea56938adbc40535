#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace mixgraph {

// Processor node types. in/out/mix carry no parameters; every other type has
// a fixed parameter-row width (see param_width).
enum class NodeType : std::uint8_t {
  In = 0,
  Out,
  Mix,
  Gain,
  Eq,
  Compressor,
  Noisegate,
  Imager,
  Reverb,
  Delay,
};

inline constexpr int kNumNodeTypes = 10;

constexpr std::array<NodeType, kNumNodeTypes> all_node_types() {
  return {NodeType::In,         NodeType::Out,       NodeType::Mix,
          NodeType::Gain,       NodeType::Eq,        NodeType::Compressor,
          NodeType::Noisegate,  NodeType::Imager,    NodeType::Reverb,
          NodeType::Delay};
}

// Single-letter codes used in type strings and DOT labels.
char type_code(NodeType t);
std::string_view type_name(NodeType t);
std::optional<NodeType> type_from_name(std::string_view name);
std::optional<NodeType> type_from_code(char code);

// Width of one parameter row. Zero for in/out/mix.
int param_width(NodeType t);

// Equalizer: 1024 log-magnitude bins -> 2047-tap zero-phase FIR.
inline constexpr int kEqFirLength = 2047;
inline constexpr int kEqNumBins = (kEqFirLength + 1) / 2;

// Reverb: row layout [H0_mid | Hd_mid | H0_side | Hd_side], 192 bins each.
inline constexpr int kReverbNumBins = 192;
inline constexpr int kReverbStftLength = 384;
inline constexpr int kReverbStftHop = 192;
inline constexpr double kReverbSeconds = 2.0;

// Multitap delay: 20 taps per channel, one per 100 ms window over a 2 s span.
// Row layout per tap: [re(z), im(z), 20 FIR log-magnitudes]; the 20 left-channel
// taps come first, then the 20 right-channel taps.
inline constexpr int kDelayTapsPerChannel = 20;
inline constexpr int kDelayFirLength = 39;
inline constexpr int kDelayFirBins = (kDelayFirLength + 1) / 2;
inline constexpr int kDelayTapStride = 2 + kDelayFirBins;
inline constexpr double kDelaySeconds = 2.0;
inline constexpr double kDelayWindowSeconds = 0.1;
// Taps whose FIR log-magnitudes all sit at or below this value are disabled.
inline constexpr double kDelayDisabledLogMag = -60.0;

}  // namespace mixgraph
