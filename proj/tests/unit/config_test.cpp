#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "secl/config.hpp"
#include "secl/error.hpp"

namespace secl {
namespace {

namespace fs = std::filesystem;

const char* kFull = R"([data]
name = toy
root = data
edges = toy/edges.txt
attributes = toy/attributes.bin
labels = toy/labels.txt

[model]
clusters = 4
structure_widths = 1024, 500
attribute_widths = 1024,500
filter_depth = 5
hidden_activation = identity

[loss]
tau = 0.8
lambda1 = 0.5
lambda2 = 10
ablation = no-CL

[train]
learning_rate = 5e-5
epochs = 12
seed = 42
runs = 3
dense_cap = 100
similarity_dense_cap = 50
deterministic = true

[kmeans]
restarts = 4
max_iter = 50
)";

TEST(Config, ParsesEverySection) {
  const TrainConfig c = parse_config(kFull, "/cfg");
  EXPECT_EQ(c.dataset, "toy");
  EXPECT_EQ(c.edges, fs::path("/cfg/data/toy/edges.txt"));
  EXPECT_EQ(c.attributes, fs::path("/cfg/data/toy/attributes.bin"));
  ASSERT_TRUE(c.labels.has_value());
  EXPECT_EQ(c.clusters, 4);
  EXPECT_EQ(c.structure_widths, (std::vector<Index>{1024, 500}));
  EXPECT_EQ(c.attribute_widths, (std::vector<Index>{1024, 500}));
  EXPECT_EQ(c.filter_depth, 5);
  EXPECT_EQ(c.hidden_activation, Activation::kIdentity);
  EXPECT_EQ(c.tau, 0.8);
  EXPECT_EQ(c.lambda1, 0.5);
  EXPECT_EQ(c.lambda2, 10.0);
  EXPECT_EQ(c.ablation, Ablation::kNoContrastive);
  EXPECT_EQ(c.learning_rate, 5e-5);
  EXPECT_EQ(c.epochs, 12);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.runs, 3);
  EXPECT_EQ(c.dense_cap, 100);
  EXPECT_EQ(c.similarity_dense_cap, 50);
  EXPECT_TRUE(c.deterministic);
  EXPECT_EQ(c.kmeans.restarts, 4);
  EXPECT_EQ(c.kmeans.max_iter, 50);
}

TEST(Config, DefaultsAndDataRootOverride) {
  const TrainConfig c = parse_config("[data]\nedges = e.txt\nattributes = x.txt\n[model]\nclusters = 2\n", "/cfg",
                                     fs::path("/elsewhere"));
  EXPECT_EQ(c.edges, fs::path("/elsewhere/e.txt"));
  EXPECT_FALSE(c.labels.has_value());
  EXPECT_EQ(c.epochs, 400);
  EXPECT_EQ(c.runs, 10);
  EXPECT_EQ(c.ablation, Ablation::kFull);
  EXPECT_EQ(c.kmeans.restarts, 10);
  EXPECT_EQ(c.kmeans.max_iter, 300);
  EXPECT_EQ(c.dense_cap, 10000);
  EXPECT_EQ(c.similarity_dense_cap, 4096);
  EXPECT_FALSE(c.deterministic);
}

TEST(Config, ValidationNamesTheField) {
  const std::string base = "[model]\nclusters = 2\n";
  auto expect_error = [&](const std::string& extra, const std::string& field) {
    try {
      parse_config(base + extra, ".");
      FAIL() << "accepted: " << extra;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  expect_error("[loss]\ntau = 0\n", "tau");
  expect_error("[loss]\ntau = -1\n", "tau");
  expect_error("[loss]\nlambda1 = -0.1\n", "lambda1");
  expect_error("[loss]\nlambda2 = -1\n", "lambda2");
  expect_error("[train]\nepochs = 0\n", "epochs");
  expect_error("[train]\nruns = 0\n", "runs");
  expect_error("[train]\nepochs = many\n", "epochs");
  expect_error("[train]\ndeterministic = maybe\n", "deterministic");
  expect_error("[loss]\nablation = half\n", "ablation");
  expect_error("structure_widths = 500,0\n", "width");
  EXPECT_THROW(parse_config("[model]\nclusters = 2\nstructure_widths = 64\nattribute_widths = 32\n", "."),
               ConfigError);
  EXPECT_THROW(parse_config("[model\n", "."), ParseError);
}

TEST(Config, HashTracksContent) {
  const TrainConfig a = parse_config(kFull, "/cfg");
  TrainConfig b = a;
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  b.seed += 1;
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Config, LoadResolvesRelativeToFile) {
  const fs::path dir = fs::temp_directory_path() / "secl_config_test";
  fs::create_directories(dir);
  std::ofstream(dir / "c.ini") << kFull;
  const TrainConfig c = load_config(dir / "c.ini");
  EXPECT_EQ(c.edges, (dir / "data/toy/edges.txt").lexically_normal());
  EXPECT_THROW(load_config(dir / "missing.ini"), ConfigError);
  fs::remove_all(dir);
}

TEST(Config, BundledConfigsParse) {
  for (const char* name : {"cora", "citeseer", "amap", "bat", "eat", "uat"}) {
    const TrainConfig c = load_config(fs::path(SECL_CONFIG_DIR) / (std::string(name) + ".ini"));
    EXPECT_EQ(c.dataset, name);
    EXPECT_EQ(c.epochs, 400);
    EXPECT_EQ(c.runs, 10);
  }
  const TrainConfig cora = load_config(fs::path(SECL_CONFIG_DIR) / "cora.ini");
  EXPECT_EQ(cora.learning_rate, 1e-3);
  EXPECT_EQ(cora.filter_depth, 3);
  EXPECT_EQ(cora.tau, 0.1);
  EXPECT_EQ(cora.clusters, 7);
  EXPECT_EQ(cora.attribute_widths, (std::vector<Index>{500}));
  EXPECT_EQ(cora.lambda1, 0.1);
  EXPECT_EQ(cora.lambda2, 0.01);
  const TrainConfig citeseer = load_config(fs::path(SECL_CONFIG_DIR) / "citeseer.ini");
  EXPECT_EQ(citeseer.learning_rate, 5e-5);
  EXPECT_EQ(citeseer.filter_depth, 2);
  EXPECT_EQ(citeseer.tau, 0.8);
  EXPECT_EQ(citeseer.structure_widths, (std::vector<Index>{1024, 500}));
  const TrainConfig eat = load_config(fs::path(SECL_CONFIG_DIR) / "eat.ini");
  EXPECT_EQ(eat.learning_rate, 5e-2);
  EXPECT_EQ(eat.filter_depth, 5);
  EXPECT_EQ(eat.tau, 1.0);
  const TrainConfig amap = load_config(fs::path(SECL_CONFIG_DIR) / "amap.ini");
  EXPECT_EQ(amap.lambda2, 10.0);
  EXPECT_EQ(amap.clusters, 8);
}

}  // namespace
}  // namespace secl
