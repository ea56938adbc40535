#include "mixgraph/types.hpp"

namespace mixgraph {

namespace {

struct TypeInfo {
  NodeType type;
  char code;
  std::string_view name;
  int width;
};

constexpr std::array<TypeInfo, kNumNodeTypes> kTypeInfo = {{
    {NodeType::In, 'i', "in", 0},
    {NodeType::Out, 'o', "out", 0},
    {NodeType::Mix, 'm', "mix", 0},
    {NodeType::Gain, 'g', "gain", 2},
    {NodeType::Eq, 'e', "eq", kEqNumBins},
    {NodeType::Compressor, 'c', "compressor", 4},
    {NodeType::Noisegate, 'n', "noisegate", 4},
    {NodeType::Imager, 's', "imager", 1},
    {NodeType::Reverb, 'r', "reverb", 4 * kReverbNumBins},
    {NodeType::Delay, 'd', "delay", 2 * kDelayTapsPerChannel * kDelayTapStride},
}};

const TypeInfo& info(NodeType t) { return kTypeInfo[static_cast<std::size_t>(t)]; }

}  // namespace

char type_code(NodeType t) { return info(t).code; }

std::string_view type_name(NodeType t) { return info(t).name; }

std::optional<NodeType> type_from_name(std::string_view name) {
  for (const auto& ti : kTypeInfo) {
    if (ti.name == name) return ti.type;
  }
  return std::nullopt;
}

std::optional<NodeType> type_from_code(char code) {
  for (const auto& ti : kTypeInfo) {
    if (ti.code == code) return ti.type;
  }
  return std::nullopt;
}

int param_width(NodeType t) { return info(t).width; }

}  // namespace mixgraph
