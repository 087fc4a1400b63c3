#include "anykernel/transcript.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "anykernel/errors.hpp"
#include "anykernel/graph.hpp"
#include "anykernel/rng.hpp"

namespace anykernel {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "anykernel-transcript";
constexpr int kVersion = 1;

json encode_features(const Features& x) {
  if (x.empty()) return nullptr;
  if (x.is_dense()) return json{{"d", x.dense()}};
  if (x.is_bits()) {
    std::string s;
    for (auto b : x.bits().bits) s.push_back(b > 0 ? '+' : '-');
    return json{{"b", s}};
  }
  const auto& u = x.element();
  json edges = json::array();
  for (auto [a, b] : u.edges) edges.push_back({a, b});
  return json{{"u",
               {{"i", u.i}, {"j", u.j}, {"t", u.time}, {"nodes", u.nodes}, {"z", u.node_features},
                {"edges", edges}}}};
}

Features decode_features(const json& j) {
  if (j.is_null()) return Features();
  if (j.contains("d")) return Features(j.at("d").get<DenseVector>());
  if (j.contains("b")) {
    BitVector b;
    for (char c : j.at("b").get<std::string>()) {
      if (c != '+' && c != '-') throw DomainError("bit string must use '+' and '-'");
      b.bits.push_back(c == '+' ? 1 : -1);
    }
    return Features(std::move(b));
  }
  if (j.contains("u")) {
    const auto& e = j.at("u");
    UniverseElement u;
    u.i = e.at("i").get<std::int64_t>();
    u.j = e.at("j").get<std::int64_t>();
    u.time = e.at("t").get<std::int64_t>();
    u.nodes = e.at("nodes").get<std::vector<std::int64_t>>();
    u.node_features = e.at("z").get<std::vector<DenseVector>>();
    for (const auto& ed : e.at("edges")) u.edges.emplace_back(ed.at(0).get<int>(), ed.at(1).get<int>());
    return Features(make_element(std::move(u)));
  }
  throw DomainError("unknown feature encoding");
}

json encode_header(const TranscriptHeader& h) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["mode"] = h.mode;
  j["kernel"] = h.kernel;
  j["kernel_hash"] = kernel_hash(h.kernel);
  j["seed"] = h.seed;
  j["quantile"] = h.quantile;
  j["y_min"] = h.y_min;
  j["y_max"] = h.y_max;
  j["context"] = json::parse(h.context);
  return j;
}

TranscriptHeader decode_header(const json& j) {
  if (j.value("format", "") != kFormat) throw DomainError("not a transcript header");
  if (j.value("version", 0) != kVersion) throw DomainError("unsupported transcript version");
  TranscriptHeader h;
  h.mode = j.at("mode").get<std::string>();
  h.kernel = j.at("kernel").get<std::string>();
  h.stored_hash = j.value("kernel_hash", "");
  h.seed = j.at("seed").get<std::uint64_t>();
  h.quantile = j.at("quantile").get<double>();
  h.y_min = j.at("y_min").get<double>();
  h.y_max = j.at("y_max").get<double>();
  h.context = j.at("context").dump();
  return h;
}

template <class F>
void for_each_record(std::istream& in, F&& f) {
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      f(lineno, json::parse(line));
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw FormatError(lineno, std::string("malformed record: ") + e.what());
    }
  }
  if (lineno == 0) throw FormatError(0, "empty transcript");
}

}  // namespace

std::string kernel_hash(const std::string& kernel_description) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(kernel_description)));
  return buf;
}

void write_transcript(std::ostream& out, const Transcript& tr) {
  out << encode_header(tr.header).dump() << '\n';
  for (const auto& r : tr.rounds) {
    json j;
    j["t"] = r.t;
    j["x"] = encode_features(r.x);
    j["q"] = r.dist.q;
    j["q2"] = r.dist.q2;
    j["tau"] = r.dist.tau;
    j["p"] = r.p;
    j["y"] = r.y;
    j["s"] = {r.s_q, r.s_q2};
    j["eps"] = r.epsilon;
    j["b"] = r.b;
    j["branch"] = static_cast<int>(r.branch);
    out << j.dump() << '\n';
  }
}

Transcript read_transcript(std::istream& in) {
  Transcript tr;
  bool header = false;
  for_each_record(in, [&](std::int64_t lineno, const json& j) {
    if (!header) {
      tr.header = decode_header(j);
      if (tr.header.mode == "vector") throw FormatError(lineno, "vector transcript; use the vector reader");
      header = true;
      return;
    }
    Round r;
    r.t = j.at("t").get<std::int64_t>();
    if (r.t != static_cast<std::int64_t>(tr.rounds.size()) + 1)
      throw FormatError(lineno, "rounds must be consecutive from 1");
    r.x = decode_features(j.at("x"));
    r.dist.q = j.at("q").get<double>();
    r.dist.q2 = j.at("q2").get<double>();
    r.dist.tau = j.at("tau").get<double>();
    r.p = j.at("p").get<double>();
    r.y = j.at("y").get<double>();
    r.s_q = j.at("s").at(0).get<double>();
    r.s_q2 = j.at("s").at(1).get<double>();
    r.epsilon = j.at("eps").get<double>();
    r.b = j.at("b").get<double>();
    const int branch = j.at("branch").get<int>();
    if (branch < 0 || branch > 3) throw FormatError(lineno, "unknown branch code");
    r.branch = static_cast<Branch>(branch);
    if (!(r.dist.tau >= 0.0 && r.dist.tau <= 1.0)) throw FormatError(lineno, "tau outside [0,1]");
    if (r.p != r.dist.q && r.p != r.dist.q2) throw FormatError(lineno, "p is not in the support");
    tr.rounds.push_back(std::move(r));
  });
  return tr;
}

void write_vector_transcript(std::ostream& out, const VectorTranscript& tr) {
  auto h = encode_header(tr.header);
  h["mode"] = "vector";
  h["lower"] = tr.lower;
  h["upper"] = tr.upper;
  out << h.dump() << '\n';
  for (const auto& r : tr.rounds) {
    json j;
    j["t"] = r.t;
    j["x"] = encode_features(r.x);
    j["p"] = r.p;
    j["y"] = r.y;
    j["residual"] = r.residual;
    j["approx"] = r.approximate;
    j["iters"] = r.iterations;
    out << j.dump() << '\n';
  }
}

VectorTranscript read_vector_transcript(std::istream& in) {
  VectorTranscript tr;
  bool header = false;
  for_each_record(in, [&](std::int64_t lineno, const json& j) {
    if (!header) {
      tr.header = decode_header(j);
      if (tr.header.mode != "vector") throw FormatError(lineno, "not a vector transcript");
      tr.lower = j.at("lower").get<std::vector<double>>();
      tr.upper = j.at("upper").get<std::vector<double>>();
      header = true;
      return;
    }
    VectorRound r;
    r.t = j.at("t").get<std::int64_t>();
    if (r.t != static_cast<std::int64_t>(tr.rounds.size()) + 1)
      throw FormatError(lineno, "rounds must be consecutive from 1");
    r.x = decode_features(j.at("x"));
    r.p = j.at("p").get<std::vector<double>>();
    r.y = j.at("y").get<std::vector<double>>();
    r.residual = j.at("residual").get<double>();
    r.approximate = j.at("approx").get<bool>();
    r.iterations = j.at("iters").get<int>();
    if (r.p.size() != tr.lower.size() || r.y.size() != tr.lower.size())
      throw FormatError(lineno, "vector dimension mismatch");
    tr.rounds.push_back(std::move(r));
  });
  return tr;
}

std::string peek_transcript_mode(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(1, "empty transcript");
  try {
    return decode_header(json::parse(line)).mode;
  } catch (const std::exception& e) {
    throw FormatError(1, std::string("malformed header: ") + e.what());
  }
}

}  // namespace anykernel
