#include "dyadfuse/model_io.hpp"

#include <fstream>

namespace dyadfuse::classify {

using nlohmann::json;

namespace {

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

template <typename F>
auto parse_guard(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigParse, std::string(what) + ": " + e.what());
  }
}

}  // namespace

json to_json(const KernelBank& bank) {
  json kernels = json::array();
  for (const auto& k : bank.kernels) {
    kernels.push_back({{"length", k.length},
                       {"weights", k.weights},
                       {"bias", k.bias},
                       {"dilation", k.dilation},
                       {"padded", k.padded},
                       {"channels", k.channel_subset}});
  }
  return {{"seed", bank.seed},
          {"timesteps", bank.timesteps},
          {"channels", bank.channels},
          {"kernels", std::move(kernels)}};
}

json to_json(const RidgeModel& m) {
  return {{"input_width", m.input_width}, {"kept_columns", m.kept_columns},
          {"mean", vector_json(m.mean)},  {"scale", vector_json(m.scale)},
          {"weights", vector_json(m.weights)}, {"intercept", m.intercept},
          {"alpha", m.alpha},             {"loo_error", m.loo_error}};
}

json to_json(const DecisionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes()) {
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"depth", n.depth},
                     {"counts", n.counts},
                     {"scores", n.scores}});
  }
  // Unlimited depth is written as null.
  json depth = tree.max_depth() == kUnlimitedDepth ? json(nullptr)
                                                    : json(tree.max_depth());
  return {{"max_depth", depth},
          {"num_features", tree.num_features()},
          {"nodes", std::move(nodes)}};
}

json to_json(const IntervalForest& forest) {
  json trees = json::array();
  for (const auto& t : forest.trees) {
    json intervals = json::array();
    for (const auto& iv : t.intervals) {
      intervals.push_back({iv.channel, iv.start, iv.length});
    }
    trees.push_back({{"intervals", std::move(intervals)},
                     {"tree", to_json(t.tree)}});
  }
  return {{"seed", forest.seed},
          {"timesteps", forest.timesteps},
          {"channels", forest.channels},
          {"trees", std::move(trees)}};
}

json to_json(const RocketModel& model) {
  return {{"type", "rocket"},
          {"bank", to_json(model.bank)},
          {"ridge", to_json(model.ridge)}};
}

KernelBank kernel_bank_from_json(const json& j) {
  return parse_guard("kernel bank", [&] {
    KernelBank bank;
    bank.seed = j.at("seed").get<std::uint64_t>();
    bank.timesteps = j.at("timesteps").get<std::size_t>();
    bank.channels = j.at("channels").get<std::size_t>();
    for (const auto& k : j.at("kernels")) {
      RocketKernel kernel;
      kernel.length = k.at("length").get<std::size_t>();
      kernel.weights = k.at("weights").get<std::vector<double>>();
      kernel.bias = k.at("bias").get<double>();
      kernel.dilation = k.at("dilation").get<std::size_t>();
      kernel.padded = k.at("padded").get<bool>();
      kernel.channel_subset = k.at("channels").get<std::vector<std::size_t>>();
      bank.kernels.push_back(std::move(kernel));
    }
    return bank;
  });
}

RidgeModel ridge_from_json(const json& j) {
  return parse_guard("ridge model", [&] {
    RidgeModel m;
    m.input_width = j.at("input_width").get<std::size_t>();
    m.kept_columns = j.at("kept_columns").get<std::vector<std::size_t>>();
    m.mean = vector_from(j.at("mean"));
    m.scale = vector_from(j.at("scale"));
    m.weights = vector_from(j.at("weights"));
    m.intercept = j.at("intercept").get<double>();
    m.alpha = j.at("alpha").get<double>();
    m.loo_error = j.at("loo_error").get<double>();
    return m;
  });
}

DecisionTree tree_from_json(const json& j) {
  return parse_guard("decision tree", [&] {
    std::vector<TreeNode> nodes;
    for (const auto& n : j.at("nodes")) {
      TreeNode node;
      node.feature = n.at("feature").get<int>();
      node.threshold = n.at("threshold").get<double>();
      node.left = n.at("left").get<int>();
      node.right = n.at("right").get<int>();
      node.depth = n.at("depth").get<std::size_t>();
      node.counts = n.at("counts").get<std::array<std::size_t, kNumClasses>>();
      node.scores = n.at("scores").get<ClassScores>();
      nodes.push_back(node);
    }
    const auto& depth = j.at("max_depth");
    return DecisionTree(std::move(nodes),
                        depth.is_null() ? kUnlimitedDepth
                                        : depth.get<std::size_t>(),
                        j.at("num_features").get<std::size_t>());
  });
}

IntervalForest forest_from_json(const json& j) {
  return parse_guard("interval forest", [&] {
    IntervalForest forest;
    forest.seed = j.at("seed").get<std::uint64_t>();
    forest.timesteps = j.at("timesteps").get<std::size_t>();
    forest.channels = j.at("channels").get<std::size_t>();
    for (const auto& t : j.at("trees")) {
      IntervalTree member;
      for (const auto& iv : t.at("intervals")) {
        member.intervals.push_back({iv.at(0).get<std::size_t>(),
                                    iv.at(1).get<std::size_t>(),
                                    iv.at(2).get<std::size_t>()});
      }
      member.tree = tree_from_json(t.at("tree"));
      forest.trees.push_back(std::move(member));
    }
    return forest;
  });
}

RocketModel rocket_from_json(const json& j) {
  return {kernel_bank_from_json(j.at("bank")), ridge_from_json(j.at("ridge"))};
}

void save_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << j.dump(1) << '\n';
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::MissingInput, "cannot open '" + path.string() + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigParse, path.string() + ": " + e.what());
  }
}

}  // namespace dyadfuse::classify
