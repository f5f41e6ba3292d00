#include "ransd/app/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <sstream>

#include "ransd/common/csv.hpp"
#include "ransd/common/error.hpp"

namespace ransd::app {
namespace {

namespace pt = boost::property_tree;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    T value{};
    if constexpr (std::is_same_v<T, double>) {
      value = csv::parse_number(text);
      used = text.size();
    } else if constexpr (std::is_same_v<T, int>) {
      value = std::stoi(text, &used);
    } else {
      if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
      value = static_cast<T>(std::stoull(text, &used));
    }
    if (used != text.size()) throw std::invalid_argument("trailing text");
    return value;
  } catch (const Error&) {
    throw Error(ErrorKind::InvalidArgument, "config key '" + key + "': bad value '" + text + "'");
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, "config key '" + key + "': bad value '" + text + "'");
  }
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_value<T>(key, item));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ", ";
    if constexpr (std::is_same_v<T, double>)
      out += csv::format_number(v);
    else if constexpr (std::is_same_v<T, dynamic::OpKind>)
      out += std::string(dynamic::to_string(v));
    else
      out += std::to_string(v);
  }
  return out;
}

void require_fraction(const char* name, double v) {
  if (!(v > 0.0 && v <= 1.0))
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " must lie in (0, 1]");
}

}  // namespace

std::string_view to_string(Mode mode) { return mode == Mode::Static ? "static" : "dynamic"; }

Mode parse_mode(std::string_view text) {
  if (text == "static") return Mode::Static;
  if (text == "dynamic") return Mode::Dynamic;
  throw Error(ErrorKind::InvalidArgument, "mode must be 'static' or 'dynamic'");
}

void RunConfig::validate() const {
  require_fraction("split", split);
  require_fraction("variance_threshold", variance_threshold);
  if (min_df == 0) throw Error(ErrorKind::InvalidArgument, "min_df must be >= 1");
  if (mi_prefilter == 0) throw Error(ErrorKind::InvalidArgument, "mi_prefilter must be >= 1");
  if (candidates == 0) throw Error(ErrorKind::InvalidArgument, "candidates must be >= 1");
  if (folds < 2) throw Error(ErrorKind::InvalidArgument, "folds must be >= 2");
  for (int n : ngram_n)
    if (n < 1) throw Error(ErrorKind::InvalidN, "n-gram sizes must be >= 1");
  for (double c : c_grid)
    if (!(c > 0.0)) throw Error(ErrorKind::InvalidArgument, "C grid values must be positive");
  for (double g : gamma_grid)
    if (!(g > 0.0)) throw Error(ErrorKind::InvalidArgument, "gamma grid values must be positive");
  for (std::size_t t : trees_grid)
    if (t == 0) throw Error(ErrorKind::InvalidArgument, "tree counts must be >= 1");
}

std::string RunConfig::to_ini() const {
  std::ostringstream o;
  o << "format_version = 1\n\n[run]\n";
  if (mode) o << "mode = " << to_string(*mode) << '\n';
  if (!manifest.empty()) o << "manifest = " << manifest.string() << '\n';
  if (!out.empty()) o << "out = " << out.string() << '\n';
  if (seed) o << "seed = " << *seed << '\n';
  o << "split = " << csv::format_number(split) << "\n\n[features]\n"
    << "min_df = " << min_df << '\n'
    << "mi_prefilter = " << mi_prefilter << '\n'
    << "candidates = " << candidates << '\n'
    << "k_max = " << k_max << '\n'
    << "variance_threshold = " << csv::format_number(variance_threshold) << '\n'
    << "ngram_n = " << join(ngram_n) << '\n'
    << "ngram_kinds = " << join(ngram_kinds) << '\n'
    << "cooccurrence_top = " << cooccurrence_top << "\n\n[model]\n"
    << "kind = " << detect::to_string(model) << '\n'
    << "folds = " << folds << '\n'
    << "c_grid = " << join(c_grid) << '\n'
    << "gamma_grid = " << join(gamma_grid) << '\n'
    << "trees_grid = " << join(trees_grid) << '\n';
  return o.str();
}

RunConfig load_config(const std::filesystem::path& path, RunConfig cfg) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(e.line() == 0 ? ErrorKind::Io : ErrorKind::Format, e.what());
  }
  if (auto v = tree.get_optional<std::string>("format_version"); v && *v != "1")
    throw Error(ErrorKind::Format, path.string() + ": unsupported config format_version " + *v);

  auto get = [&](const std::string& key) { return tree.get_optional<std::string>(key); };
  if (auto v = get("run.mode")) cfg.mode = parse_mode(*v);
  if (auto v = get("run.manifest")) cfg.manifest = *v;
  if (auto v = get("run.out")) cfg.out = *v;
  if (auto v = get("run.seed")) cfg.seed = parse_value<std::uint64_t>("seed", *v);
  if (auto v = get("run.split")) cfg.split = parse_value<double>("split", *v);
  if (auto v = get("features.min_df")) cfg.min_df = parse_value<std::size_t>("min_df", *v);
  if (auto v = get("features.mi_prefilter"))
    cfg.mi_prefilter = parse_value<std::size_t>("mi_prefilter", *v);
  if (auto v = get("features.candidates"))
    cfg.candidates = parse_value<std::size_t>("candidates", *v);
  if (auto v = get("features.k_max")) cfg.k_max = parse_value<std::size_t>("k_max", *v);
  if (auto v = get("features.variance_threshold"))
    cfg.variance_threshold = parse_value<double>("variance_threshold", *v);
  if (auto v = get("features.ngram_n")) cfg.ngram_n = parse_list<int>("ngram_n", *v);
  if (auto v = get("features.ngram_kinds")) {
    cfg.ngram_kinds.clear();
    for (const auto& k : split_list(*v)) cfg.ngram_kinds.push_back(dynamic::parse_op_kind(k));
  }
  if (auto v = get("features.cooccurrence_top"))
    cfg.cooccurrence_top = parse_value<std::size_t>("cooccurrence_top", *v);
  if (auto v = get("model.kind")) cfg.model = detect::parse_model_kind(*v);
  if (auto v = get("model.folds")) cfg.folds = parse_value<std::size_t>("folds", *v);
  if (auto v = get("model.c_grid")) cfg.c_grid = parse_list<double>("c_grid", *v);
  if (auto v = get("model.gamma_grid")) cfg.gamma_grid = parse_list<double>("gamma_grid", *v);
  if (auto v = get("model.trees_grid")) cfg.trees_grid = parse_list<std::size_t>("trees_grid", *v);
  return cfg;
}

}  // namespace ransd::app
