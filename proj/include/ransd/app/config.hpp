#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ransd/detect/cv.hpp"
#include "ransd/dynamic/report.hpp"

namespace ransd::app {

enum class Mode { Static, Dynamic };
std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

/// Every knob of a run. Defaults follow the documented operating point; a config file
/// and command-line flags override them in that order.
struct RunConfig {
  std::optional<Mode> mode;
  std::filesystem::path manifest;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  double split = 0.8;

  std::size_t min_df = 1;
  std::size_t mi_prefilter = 2000;  // PCA input width in dynamic mode
  std::size_t candidates = 500;     // wrapper candidate pool
  std::size_t k_max = 30;
  double variance_threshold = 0.999;
  std::vector<int> ngram_n{3, 4};
  std::vector<dynamic::OpKind> ngram_kinds{dynamic::OpKind::Delete, dynamic::OpKind::Create};
  std::size_t cooccurrence_top = 50;

  detect::ModelKind model = detect::ModelKind::SvmRbf;
  std::size_t folds = 5;
  std::vector<double> c_grid{0.1, 1, 10, 100};
  std::vector<double> gamma_grid{0.001, 0.013, 0.1, 1};
  std::vector<std::size_t> trees_grid{800};

  /// Throws InvalidArgument on out-of-range values.
  void validate() const;
  /// INI text that load_config() reads back to the same values.
  std::string to_ini() const;
};

/// Reads an INI file with [run], [features] and [model] sections on top of `base`.
/// Throws Io, Format or InvalidArgument.
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace ransd::app
