#include "ransd/common/labels.hpp"

#include <algorithm>
#include <cctype>

#include "ransd/common/error.hpp"

namespace ransd {

std::string_view to_string(Label label) {
  return label == Label::Malicious ? "malicious" : "benign";
}

std::optional<Label> parse_label(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower.empty()) return std::nullopt;
  if (lower == "malicious") return Label::Malicious;
  if (lower == "benign") return Label::Benign;
  throw Error(ErrorKind::InvalidArgument, "unknown label '" + std::string(text) + "'");
}

void require_both_classes(std::span<const Label> labels, std::string_view context) {
  bool pos = false, neg = false;
  for (Label l : labels) (l == Label::Malicious ? pos : neg) = true;
  if (!pos || !neg)
    throw Error(ErrorKind::SingleClass, std::string(context) + " needs both classes present");
}

std::vector<int> to_bits(std::span<const Label> labels) {
  std::vector<int> out(labels.size());
  std::transform(labels.begin(), labels.end(), out.begin(), to_bit);
  return out;
}

}  // namespace ransd
