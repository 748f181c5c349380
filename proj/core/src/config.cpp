#include "secl/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "secl/error.hpp"

namespace secl {
namespace pt = boost::property_tree;

void TrainConfig::validate() const {
  if (!(tau > 0.0)) throw ConfigError(fmt::format("loss.tau must be positive, got {}", tau));
  if (lambda1 < 0.0) throw ConfigError(fmt::format("loss.lambda1 must be non-negative, got {}", lambda1));
  if (lambda2 < 0.0) throw ConfigError(fmt::format("loss.lambda2 must be non-negative, got {}", lambda2));
  if (epochs < 1) throw ConfigError(fmt::format("train.epochs must be at least 1, got {}", epochs));
  if (runs < 1) throw ConfigError(fmt::format("train.runs must be at least 1, got {}", runs));
  if (!(learning_rate > 0.0)) {
    throw ConfigError(fmt::format("train.learning_rate must be positive, got {}", learning_rate));
  }
  if (filter_depth < 0) throw ConfigError("model.filter_depth must be non-negative");
  if (clusters < 1) throw ConfigError("model.clusters must be at least 1");
  if (structure_widths.empty() || attribute_widths.empty()) {
    throw ConfigError("model widths must list at least one layer");
  }
  if (structure_widths.back() != attribute_widths.back()) {
    throw ConfigError("model.structure_widths and model.attribute_widths must end at the same width");
  }
  if (kmeans.restarts < 1 || kmeans.max_iter < 1) {
    throw ConfigError("kmeans.restarts and kmeans.max_iter must be at least 1");
  }
}

std::string TrainConfig::canonical() const {
  std::string out;
  auto line = [&out](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  line("data.name", dataset);
  line("data.edges", edges.generic_string());
  line("data.attributes", attributes.generic_string());
  line("data.labels", labels ? labels->generic_string() : "");
  line("model.clusters", std::to_string(clusters));
  line("model.structure_widths", format_widths(structure_widths));
  line("model.attribute_widths", format_widths(attribute_widths));
  line("model.filter_depth", std::to_string(filter_depth));
  line("model.hidden_activation", hidden_activation == Activation::kTanh ? "tanh" : "identity");
  line("loss.tau", fmt::format("{}", tau));
  line("loss.lambda1", fmt::format("{}", lambda1));
  line("loss.lambda2", fmt::format("{}", lambda2));
  line("loss.ablation", std::string(ablation_name(ablation)));
  line("train.learning_rate", fmt::format("{}", learning_rate));
  line("train.epochs", std::to_string(epochs));
  line("train.seed", std::to_string(seed));
  line("train.runs", std::to_string(runs));
  line("train.dense_cap", std::to_string(dense_cap));
  line("train.similarity_dense_cap", std::to_string(similarity_dense_cap));
  line("train.deterministic", deterministic ? "true" : "false");
  line("kmeans.restarts", std::to_string(kmeans.restarts));
  line("kmeans.max_iter", std::to_string(kmeans.max_iter));
  return out;
}

std::string TrainConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::vector<Index> parse_widths(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw ConfigError("empty entry in width list '" + text + "'");
    const std::string token = item.substr(first, last - first + 1);
    Index w = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), w);
    if (ec != std::errc() || ptr != token.data() + token.size() || w <= 0) {
      throw ConfigError("invalid layer width '" + token + "'");
    }
    out.push_back(w);
  }
  if (out.empty()) throw ConfigError("width list is empty");
  return out;
}

std::string format_widths(const std::vector<Index>& widths) { return fmt::format("{}", fmt::join(widths, ",")); }

namespace {

Activation parse_activation(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "identity" || s == "linear") return Activation::kIdentity;
  throw ConfigError("unknown activation '" + s + "' (expected tanh or identity)");
}

template <typename T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  // The defaulted overload of ptree::get swallows conversion failures.
  if (!tree.get_optional<std::string>(key)) return fallback;
  try {
    return tree.get<T>(key);
  } catch (const pt::ptree_bad_data&) {
    throw ConfigError("invalid value for " + key + ": '" + tree.get<std::string>(key) + "'");
  }
}

bool get_bool(const pt::ptree& tree, const std::string& key, bool fallback) {
  const auto v = tree.get_optional<std::string>(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + *v + "'");
}

TrainConfig from_tree(const pt::ptree& tree, const std::filesystem::path& base_dir,
                      const std::optional<std::filesystem::path>& data_root) {
  TrainConfig c;
  c.dataset = get<std::string>(tree, "data.name", c.dataset);
  std::filesystem::path root = data_root ? *data_root : base_dir / get<std::string>(tree, "data.root", ".");
  auto resolve = [&root](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : (root / path).lexically_normal();
  };
  c.edges = resolve(get<std::string>(tree, "data.edges", ""));
  c.attributes = resolve(get<std::string>(tree, "data.attributes", ""));
  if (const auto l = tree.get_optional<std::string>("data.labels"); l && !l->empty()) c.labels = resolve(*l);

  c.clusters = get<Index>(tree, "model.clusters", c.clusters);
  if (const auto w = tree.get_optional<std::string>("model.structure_widths")) c.structure_widths = parse_widths(*w);
  if (const auto w = tree.get_optional<std::string>("model.attribute_widths")) c.attribute_widths = parse_widths(*w);
  c.filter_depth = get<int>(tree, "model.filter_depth", c.filter_depth);
  if (const auto a = tree.get_optional<std::string>("model.hidden_activation")) {
    c.hidden_activation = parse_activation(*a);
  }

  c.tau = get<double>(tree, "loss.tau", c.tau);
  c.lambda1 = get<double>(tree, "loss.lambda1", c.lambda1);
  c.lambda2 = get<double>(tree, "loss.lambda2", c.lambda2);
  if (const auto a = tree.get_optional<std::string>("loss.ablation")) c.ablation = parse_ablation(*a);

  c.learning_rate = get<double>(tree, "train.learning_rate", c.learning_rate);
  c.epochs = get<int>(tree, "train.epochs", c.epochs);
  c.seed = get<std::uint64_t>(tree, "train.seed", c.seed);
  c.runs = get<int>(tree, "train.runs", c.runs);
  c.dense_cap = get<Index>(tree, "train.dense_cap", c.dense_cap);
  c.similarity_dense_cap = get<Index>(tree, "train.similarity_dense_cap", c.similarity_dense_cap);
  c.deterministic = get_bool(tree, "train.deterministic", c.deterministic);

  c.kmeans.restarts = get<int>(tree, "kmeans.restarts", c.kmeans.restarts);
  c.kmeans.max_iter = get<int>(tree, "kmeans.max_iter", c.kmeans.max_iter);
  c.validate();
  return c;
}

}  // namespace

TrainConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                         const std::optional<std::filesystem::path>& data_root) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError("<config>", e.line(), e.message());
  }
  return from_tree(tree, base_dir, data_root);
}

TrainConfig load_config(const std::filesystem::path& path,
                        const std::optional<std::filesystem::path>& data_root) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(path.string(), e.line(), e.message());
  }
  return from_tree(tree, path.parent_path(), data_root);
}

}  // namespace secl
