#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "secl/encoders.hpp"
#include "secl/kmeans.hpp"
#include "secl/losses.hpp"

namespace secl {

// Everything one training run depends on. Parsed from an INI file with the
// sections [data], [model], [loss], [train] and [kmeans].
struct TrainConfig {
  // [data]
  std::string dataset = "unnamed";
  std::filesystem::path edges;
  std::filesystem::path attributes;
  std::optional<std::filesystem::path> labels;

  // [model]
  Index clusters = 0;
  std::vector<Index> structure_widths{500};
  std::vector<Index> attribute_widths{500};
  int filter_depth = 3;
  Activation hidden_activation = Activation::kTanh;

  // [loss]
  double tau = 0.1;
  double lambda1 = 0.1;
  double lambda2 = 0.01;
  Ablation ablation = Ablation::kFull;

  // [train]
  double learning_rate = 1e-3;
  int epochs = 400;
  std::uint64_t seed = 0;
  int runs = 10;
  Index dense_cap = 10000;            // modularity matrix materialized up to this N
  Index similarity_dense_cap = 4096;  // dense L_SL up to this N
  bool deterministic = false;

  // [kmeans]
  KMeansOptions kmeans;

  // Throws ConfigError naming the offending field.
  void validate() const;
  LossWeights loss_weights() const { return {lambda1, lambda2, ablation}; }
  // Canonical "section.key = value" listing; stable across runs and used for
  // the config hash.
  std::string canonical() const;
  // FNV-1a of canonical(), as 16 hex digits.
  std::string hash() const;
};

// Relative data paths resolve against data_root when given, else against
// the [data] root key, which itself is relative to the config file's folder.
TrainConfig load_config(const std::filesystem::path& path,
                        const std::optional<std::filesystem::path>& data_root = std::nullopt);
TrainConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                         const std::optional<std::filesystem::path>& data_root = std::nullopt);

// "500" or "1024,500".
std::vector<Index> parse_widths(const std::string& text);
std::string format_widths(const std::vector<Index>& widths);

}  // namespace secl
