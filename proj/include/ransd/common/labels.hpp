#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ransd {

/// Class label. Malicious samples are the positive class throughout.
enum class Label { Benign = 0, Malicious = 1 };

std::string_view to_string(Label label);
/// Accepts "benign"/"malicious" (case-insensitive); empty text yields nullopt. Throws on anything else.
std::optional<Label> parse_label(std::string_view text);

inline int to_sign(Label label) { return label == Label::Malicious ? 1 : -1; }
inline int to_bit(Label label) { return label == Label::Malicious ? 1 : 0; }

/// Throws SingleClass unless both labels occur.
void require_both_classes(std::span<const Label> labels, std::string_view context);

std::vector<int> to_bits(std::span<const Label> labels);

}  // namespace ransd
