#include "anykernel_cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <anykernel/errors.hpp>

namespace anykernel::cli {

namespace {

using nlohmann::json;

std::string where(const YAML::Mark& m) {
  if (m.is_null()) return "config";
  return "config line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1);
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& what) { throw ConfigError(where(n.Mark()) + ": " + what); }

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) fail(n, "'" + key + "' must be a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::BadConversion&) {
    fail(n, "'" + key + "' has the wrong type");
  }
}

template <class T>
std::vector<T> sequence(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) fail(n, "'" + key + "' must be a list");
  std::vector<T> out;
  for (const auto& e : n) out.push_back(scalar<T>(e, key));
  return out;
}

void check_map(const YAML::Node& n, const std::string& section, const std::set<std::string>& allowed) {
  if (!n.IsMap()) fail(n, "'" + section + "' must be a mapping");
  for (auto it = n.begin(); it != n.end(); ++it) {
    const auto key = it->first.as<std::string>();
    if (!allowed.count(key)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError(where(it->first.Mark()) + ": unknown key '" + key + "' in " + section + " (expected one of " +
                        list + ")");
    }
  }
}

BetaComponent beta(const YAML::Node& n, const std::string& key) {
  const auto v = sequence<double>(n, key);
  if (v.size() != 2) fail(n, "'" + key + "' must be [a, b]");
  return {v[0], v[1]};
}

void read_nature(const YAML::Node& n, NatureConfig& c) {
  check_map(n, "nature",
            {"kind", "theta", "bits", "a", "b", "weights", "bias", "sigma", "first", "second", "noise", "initial_nodes",
             "arrival", "degree_cap", "communities", "roles", "base", "attachment", "closure", "homophily",
             "triadic_proposal"});
  for (auto it = n.begin(); it != n.end(); ++it) {
    const auto k = it->first.as<std::string>();
    const YAML::Node& v = it->second;
    if (k == "kind") c.kind = scalar<std::string>(v, k);
    else if (k == "theta") c.theta = scalar<double>(v, k);
    else if (k == "bits") c.bits = scalar<int>(v, k);
    else if (k == "a") c.a = scalar<double>(v, k);
    else if (k == "b") c.b = scalar<double>(v, k);
    else if (k == "weights") c.weights = sequence<double>(v, k);
    else if (k == "bias") c.bias = scalar<double>(v, k);
    else if (k == "sigma") c.sigma = scalar<double>(v, k);
    else if (k == "first") c.first = beta(v, k);
    else if (k == "second") c.second = beta(v, k);
    else if (k == "noise") c.noise = scalar<double>(v, k);
    else if (k == "initial_nodes") c.graph.initial_nodes = scalar<int>(v, k);
    else if (k == "arrival") c.graph.arrival = scalar<double>(v, k);
    else if (k == "degree_cap") c.graph.degree_cap = scalar<int>(v, k);
    else if (k == "communities") c.graph.communities = scalar<int>(v, k);
    else if (k == "roles") c.graph.roles = scalar<int>(v, k);
    else if (k == "base") c.graph.base = scalar<double>(v, k);
    else if (k == "attachment") c.graph.attachment = scalar<double>(v, k);
    else if (k == "closure") c.graph.closure = scalar<double>(v, k);
    else if (k == "homophily") c.graph.homophily = scalar<double>(v, k);
    else if (k == "triadic_proposal") c.graph.triadic_proposal = scalar<double>(v, k);
  }
}

void read_quantile(const YAML::Node& n, ExperimentConfig& c) {
  check_map(n, "quantile", {"q", "y_min", "y_max"});
  if (n["q"]) c.q = scalar<double>(n["q"], "q");
  if (n["y_min"]) c.y_min = scalar<double>(n["y_min"], "y_min");
  if (n["y_max"]) c.y_max = scalar<double>(n["y_max"], "y_max");
}

void read_vector(const YAML::Node& n, ExperimentConfig& c) {
  check_map(n, "vector", {"lower", "upper", "max_iter", "gamma"});
  if (n["lower"]) c.lower = sequence<double>(n["lower"], "lower");
  if (n["upper"]) c.upper = sequence<double>(n["upper"], "upper");
  if (n["max_iter"]) c.max_iter = scalar<int>(n["max_iter"], "max_iter");
  if (n["gamma"]) c.gamma = scalar<double>(n["gamma"], "gamma");
}

void read_omni(const YAML::Node& n, ExperimentConfig& c) {
  check_map(n, "omni", {"losses", "comparators", "trees"});
  if (n["losses"]) c.losses = sequence<std::string>(n["losses"], "losses");
  if (n["comparators"]) c.comparators = scalar<std::string>(n["comparators"], "comparators");
  if (n["trees"]) {
    const auto& t = n["trees"];
    check_map(t, "omni.trees", {"depth", "arity"});
    TreeClass tc;
    if (!t["depth"] || !t["arity"]) fail(t, "trees needs depth and arity");
    tc.depth = scalar<int>(t["depth"], "depth");
    tc.arity = scalar<int>(t["arity"], "arity");
    c.trees = tc;
  }
}

void read_batch(const YAML::Node& n, ExperimentConfig& c) {
  check_map(n, "batch", {"sample", "radius"});
  if (n["sample"]) c.sample = scalar<std::string>(n["sample"], "sample");
  if (n["radius"]) c.radius = scalar<double>(n["radius"], "radius");
}

void read_output(const YAML::Node& n, ExperimentConfig& c) {
  check_map(n, "output", {"dir", "name"});
  if (n["dir"]) c.out_dir = scalar<std::string>(n["dir"], "dir");
  if (n["name"]) c.name = scalar<std::string>(n["name"], "name");
}

const std::set<std::string> kModes{"binary", "quantile", "vector", "linkpred", "omni", "batch"};

}  // namespace

void ExperimentConfig::validate() const {
  if (!kModes.count(mode)) throw ConfigError("unknown mode '" + mode + "'");
  if (mode != "batch" && T < 1) throw ConfigError("T must be positive");
  if (probes < 1) throw ConfigError("probes must be positive");
  if (name.empty() || name.find('/') != std::string::npos) throw ConfigError("output name must be a plain file stem");
  if (mode == "quantile") {
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("quantile q must lie in (0,1)");
    if (!(y_min < y_max)) throw ConfigError("quantile needs y_min < y_max");
  }
  if (mode == "vector") {
    if (lower.empty() || lower.size() != upper.size()) throw ConfigError("vector lower/upper must be equal-length lists");
    if (max_iter < 1) throw ConfigError("vector max_iter must be positive");
  }
  if (mode == "linkpred" && bins < 1) throw ConfigError("linkpred bins must be positive");
  if (mode == "omni" && losses.empty()) throw ConfigError("omni needs at least one loss");
  if (mode == "batch") {
    if (sample.empty()) throw ConfigError("batch needs batch.sample");
    if (!(radius > 0.0)) throw ConfigError("batch radius must be positive");
  }
}

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(where(e.mark) + ": " + e.msg);
  }
  ExperimentConfig c;
  if (root.IsNull()) return c.validate(), c;
  check_map(root, "config",
            {"mode", "kernel", "T", "seed", "probes", "nature", "quantile", "vector", "linkpred", "omni", "batch",
             "output"});
  if (root["mode"]) c.mode = scalar<std::string>(root["mode"], "mode");
  if (root["kernel"]) c.kernel = scalar<std::string>(root["kernel"], "kernel");
  if (root["T"]) c.T = scalar<std::int64_t>(root["T"], "T");
  if (root["seed"]) c.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (root["probes"]) c.probes = scalar<int>(root["probes"], "probes");
  if (root["nature"]) read_nature(root["nature"], c.nature);
  if (root["quantile"]) read_quantile(root["quantile"], c);
  if (root["vector"]) read_vector(root["vector"], c);
  if (root["linkpred"]) {
    check_map(root["linkpred"], "linkpred", {"bins"});
    if (root["linkpred"]["bins"]) c.bins = scalar<int>(root["linkpred"]["bins"], "bins");
  }
  if (root["omni"]) read_omni(root["omni"], c);
  if (root["batch"]) read_batch(root["batch"], c);
  if (root["output"]) read_output(root["output"], c);
  if (root["mode"] && !kModes.count(c.mode)) fail(root["mode"], "unknown mode '" + c.mode + "'");
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::string> preset_names() {
  return {"calibration-adversary", "quantile-gaussian", "vector-gaussian", "linkpred-groups", "omni-logistic"};
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.seed = 1;
  if (name == "calibration-adversary") {
    c.mode = "binary";
    c.kernel = "calibration";
    c.nature.kind = "contrarian";
    c.T = 10000;
  } else if (name == "quantile-gaussian") {
    c.mode = "quantile";
    c.kernel = "(one)";
    c.nature.kind = "truncated-gaussian";
    c.q = 0.9;
    c.T = 10000;
  } else if (name == "vector-gaussian") {
    c.mode = "vector";
    c.kernel = "(one)";
    c.gamma = 1.0;
    c.nature.kind = "vector-noise";
    c.T = 300;
  } else if (name == "linkpred-groups") {
    c.mode = "linkpred";
    c.kernel = "multicalibration";
    c.nature.kind = "graph-evolution";
    c.T = 2000;
  } else if (name == "omni-logistic") {
    c.mode = "omni";
    c.nature.kind = "logistic";
    c.nature.weights = {1.0, -0.8, 0.6, 0.4, -0.3, 0.2};
    c.T = 2000;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  c.validate();
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  const auto& n = c.nature;
  json nature{{"kind", n.kind},
              {"theta", n.theta},
              {"bits", n.bits},
              {"a", n.a},
              {"b", n.b},
              {"weights", n.weights},
              {"bias", n.bias},
              {"sigma", n.sigma},
              {"first", {n.first.a, n.first.b}},
              {"second", {n.second.a, n.second.b}},
              {"noise", n.noise},
              {"initial_nodes", n.graph.initial_nodes},
              {"arrival", n.graph.arrival},
              {"degree_cap", n.graph.degree_cap},
              {"communities", n.graph.communities},
              {"roles", n.graph.roles},
              {"base", n.graph.base},
              {"attachment", n.graph.attachment},
              {"closure", n.graph.closure},
              {"homophily", n.graph.homophily},
              {"triadic_proposal", n.graph.triadic_proposal}};
  json j{{"mode", c.mode},     {"kernel", c.kernel}, {"nature", nature},       {"T", c.T},
         {"seed", c.seed},     {"probes", c.probes}, {"q", c.q},             {"y_min", c.y_min},
         {"y_max", c.y_max},   {"lower", c.lower},   {"upper", c.upper},     {"max_iter", c.max_iter},
         {"gamma", c.gamma},   {"bins", c.bins},     {"losses", c.losses},   {"comparators", c.comparators},
         {"sample", c.sample}, {"radius", c.radius}, {"out_dir", c.out_dir}, {"name", c.name}};
  j["trees"] = c.trees ? json{{"depth", c.trees->depth}, {"arity", c.trees->arity}} : json(nullptr);
  return j.dump();
}

ExperimentConfig config_from_json(const std::string& text) {
  ExperimentConfig c;
  try {
    const json j = json::parse(text);
    const json& n = j.at("nature");
    auto& nc = c.nature;
    nc.kind = n.at("kind").get<std::string>();
    nc.theta = n.at("theta").get<double>();
    nc.bits = n.at("bits").get<int>();
    nc.a = n.at("a").get<double>();
    nc.b = n.at("b").get<double>();
    nc.weights = n.at("weights").get<std::vector<double>>();
    nc.bias = n.at("bias").get<double>();
    nc.sigma = n.at("sigma").get<double>();
    nc.first = {n.at("first").at(0).get<double>(), n.at("first").at(1).get<double>()};
    nc.second = {n.at("second").at(0).get<double>(), n.at("second").at(1).get<double>()};
    nc.noise = n.at("noise").get<double>();
    nc.graph.initial_nodes = n.at("initial_nodes").get<int>();
    nc.graph.arrival = n.at("arrival").get<double>();
    nc.graph.degree_cap = n.at("degree_cap").get<int>();
    nc.graph.communities = n.at("communities").get<int>();
    nc.graph.roles = n.at("roles").get<int>();
    nc.graph.base = n.at("base").get<double>();
    nc.graph.attachment = n.at("attachment").get<double>();
    nc.graph.closure = n.at("closure").get<double>();
    nc.graph.homophily = n.at("homophily").get<double>();
    nc.graph.triadic_proposal = n.at("triadic_proposal").get<double>();
    c.mode = j.at("mode").get<std::string>();
    c.kernel = j.at("kernel").get<std::string>();
    c.T = j.at("T").get<std::int64_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.probes = j.at("probes").get<int>();
    c.q = j.at("q").get<double>();
    c.y_min = j.at("y_min").get<double>();
    c.y_max = j.at("y_max").get<double>();
    c.lower = j.at("lower").get<std::vector<double>>();
    c.upper = j.at("upper").get<std::vector<double>>();
    c.max_iter = j.at("max_iter").get<int>();
    c.gamma = j.at("gamma").get<double>();
    c.bins = j.at("bins").get<int>();
    c.losses = j.at("losses").get<std::vector<std::string>>();
    c.comparators = j.at("comparators").get<std::string>();
    c.sample = j.at("sample").get<std::string>();
    c.radius = j.at("radius").get<double>();
    c.out_dir = j.at("out_dir").get<std::string>();
    c.name = j.at("name").get<std::string>();
    if (!j.at("trees").is_null()) c.trees = TreeClass{j["trees"].at("depth").get<int>(), j["trees"].at("arity").get<int>()};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("transcript context: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace anykernel::cli
