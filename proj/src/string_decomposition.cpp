#include "reparse/string_decomposition.hpp"

namespace reparse {

std::string to_debug_string(const ValidPairSeq& v) {
  std::string out;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (j) out += ' ';
    out += '(' + std::to_string(v.position(j)) + ',';
    std::uint8_t x = v.boundary(j);
    if (x & kBoundaryStart) out += 's';
    if (x & kBoundaryAccept) out += 'f';
    out += ')';
  }
  return out;
}

StringDecomposition merge_labels(std::span<const BlockLabel> labels, const ValidPairSeq& v, std::size_t n) {
  if (labels.size() != v.size() + 1) throw std::invalid_argument("one label per block expected");
  StringDecomposition sd;
  sd.bounds.push_back(0);
  BlockLabel current = BlockLabel::outer;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] == current) continue;
    sd.bounds.push_back(static_cast<std::uint32_t>(block_range(v, n, j).first));
    current = labels[j];
  }
  if (current == BlockLabel::inner) sd.bounds.push_back(static_cast<std::uint32_t>(n));
  sd.bounds.push_back(static_cast<std::uint32_t>(n));
  return sd;
}

}  // namespace reparse
