#include "anykernel_cli/experiment.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <anykernel/batch.hpp>
#include <anykernel/errors.hpp>
#include <anykernel/gram.hpp>
#include <anykernel/omni.hpp>

#include "anykernel_cli/kernel_expr.hpp"
#include "anykernel_cli/svg.hpp"

namespace anykernel::cli {

namespace fs = std::filesystem;

namespace {

struct Setup {
  ExperimentConfig cfg;
  Kernel kernel;
  std::optional<MatrixKernel> matrix;
  std::optional<OutcomeBox> box;
  std::optional<GroupFamily> groups;
  std::vector<Loss> losses;
  std::vector<Comparator> comparators;
  double b_kdoi = 0.0;
  double b_khoi = 0.0;
  std::shared_ptr<RealSimulator> real;  // quantile: CDF and rho for the metrics
};

struct ProbeSeries {
  std::string name;
  std::vector<double> error;  // cumulative
  std::vector<double> bound;  // cumulative
};

[[noreturn]] void wrong_nature(const ExperimentConfig& c) {
  throw ConfigError("nature.kind '" + c.nature.kind + "' does not fit mode '" + c.mode + "'");
}

GroupFamily graph_groups(const GraphEvolutionParams& p) {
  std::vector<std::size_t> idx;
  for (int k = 0; k < p.communities + p.roles; ++k) idx.push_back(static_cast<std::size_t>(k));
  return GroupFamily::from_feature_indices(idx, 2);
}

std::unique_ptr<LogisticNature> make_logistic(const ExperimentConfig& c) {
  if (c.nature.weights.empty()) throw ConfigError("logistic nature needs nature.weights");
  return std::make_unique<LogisticNature>(c.nature.weights, c.nature.bias, c.seed);
}

std::unique_ptr<RealSimulator> make_real(const ExperimentConfig& c) {
  if (c.nature.kind == "truncated-gaussian") return make_truncated_gaussian(c.y_min, c.y_max, c.nature.sigma, c.seed);
  if (c.nature.kind == "beta-mixture") return make_beta_mixture(c.y_min, c.y_max, c.nature.first, c.nature.second, c.seed);
  wrong_nature(c);
}

// Tabulates the Bayes predictor, three constants and a one-coordinate logistic over {-1,+1}^n.
std::vector<Comparator> builtin_comparators(const LogisticNature& nature) {
  const int n = nature.dim();
  if (n > 16) throw ConfigError("builtin comparators tabulate at most 16 bits");
  std::vector<std::pair<std::string, double>> bayes, zero, one, half, first;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    BitVector b;
    for (int i = 0; i < n; ++i) b.bits.push_back((mask >> i) & 1U ? 1 : -1);
    const Features x(b);
    const std::string key = feature_key(x);
    bayes.emplace_back(key, nature.bayes(x));
    zero.emplace_back(key, 0.0);
    one.emplace_back(key, 1.0);
    half.emplace_back(key, 0.5);
    first.emplace_back(key, 1.0 / (1.0 + std::exp(-2.0 * b.bits[0])));
  }
  return {tabulated_comparator("bayes", bayes), tabulated_comparator("zero", zero), tabulated_comparator("one", one),
          tabulated_comparator("half", half), tabulated_comparator("first-coordinate", first)};
}

Setup make_setup(const ExperimentConfig& c) {
  Setup s;
  s.cfg = c;
  const auto& kind = c.nature.kind;
  if (c.mode == "binary") {
    if (kind != "iid-bernoulli" && kind != "contrarian" && kind != "performative-sigmoid" && kind != "logistic")
      wrong_nature(c);
    s.kernel = parse_kernel(c.kernel);
  } else if (c.mode == "linkpred") {
    if (kind != "graph-evolution") wrong_nature(c);
    s.groups = graph_groups(c.nature.graph);
    s.kernel = parse_kernel(c.kernel, KernelContext{s.groups});
  } else if (c.mode == "omni") {
    if (kind != "logistic") wrong_nature(c);
    for (const auto& name : c.losses) s.losses.push_back(named_loss(name));
    if (c.comparators == "builtin") {
      s.comparators = builtin_comparators(*make_logistic(c));
    } else {
      std::ifstream in(c.comparators);
      if (!in) throw ConfigError("cannot open comparator table '" + c.comparators + "'");
      s.comparators = read_tabulated_comparators(in);
    }
    ComparatorSet set{s.comparators, c.trees};
    const auto doi = kdoi_kernel(s.losses);
    const auto hoi = khoi_kernel(s.losses, set);
    s.b_kdoi = doi.bound;
    s.b_khoi = hoi.bound;
    s.kernel = doi.kernel + hoi.kernel;
  } else if (c.mode == "quantile") {
    s.real = make_real(c);
    s.kernel = parse_kernel(c.kernel);
  } else if (c.mode == "vector") {
    if (kind != "vector-noise") wrong_nature(c);
    OutcomeBox box{Eigen::Map<const Eigen::VectorXd>(c.lower.data(), static_cast<Eigen::Index>(c.lower.size())),
                   Eigen::Map<const Eigen::VectorXd>(c.upper.data(), static_cast<Eigen::Index>(c.upper.size()))};
    box.validate();
    s.kernel = parse_kernel(c.kernel);
    const int d = box.dim();
    s.matrix = c.gamma > 0.0 ? gaussian_prediction_matrix_kernel(d, c.gamma, Eigen::MatrixXd::Identity(d, d), s.kernel)
                             : identity_matrix_kernel(s.kernel, d);
    s.box = box;
  }
  return s;
}

std::string kernel_description(const Setup& s) { return s.matrix ? s.matrix->describe() : s.kernel.describe(); }

std::size_t probe_index(std::size_t T, int j, int probes) {
  return static_cast<std::size_t>(static_cast<double>(j) * static_cast<double>(T) / probes);
}

double probe_p(int j, int probes, double lo, double hi) {
  if (probes == 1) return (lo + hi) / 2.0;
  return lo + (hi - lo) * static_cast<double>(j) / (probes - 1);
}

ProbeSeries scalar_probe(const Setup& s, const std::vector<Round>& rounds, int j) {
  const auto& c = s.cfg;
  const bool quantile = c.mode == "quantile";
  const double lo = quantile ? c.y_min : 0.0;
  const double hi = quantile ? c.y_max : 1.0;
  const Point z_star{rounds[probe_index(rounds.size(), j, c.probes)].x, probe_p(j, c.probes, lo, hi)};
  const double norm = std::sqrt(s.kernel.diag(z_star));
  ProbeSeries out;
  out.name = "probe-" + std::to_string(j);
  double e = 0.0;
  double v = quantile ? s.real->rho() : 1.0;
  for (const auto& r : rounds) {
    e += r.dist.expect([&](double p) {
      const double res = quantile ? quantile_residual(r.y, p, c.q) : r.y - p;
      return res * s.kernel(Point{r.x, p}, z_star);
    });
    v += r.dist.expect([&](double p) {
      const double w = quantile ? c.q * (1.0 - c.q) : p * (1.0 - p);
      return w * s.kernel.diag(Point{r.x, p});
    });
    out.error.push_back(e);
    out.bound.push_back(norm * std::sqrt(v));
  }
  return out;
}

Eigen::VectorXd as_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ProbeSeries vector_probe(const Setup& s, const std::vector<VectorRound>& rounds, int j) {
  const auto& k = *s.matrix;
  const int d = s.box->dim();
  const VectorPoint z_star{rounds[probe_index(rounds.size(), j, s.cfg.probes)].x, s.box->midpoint()};
  const Eigen::VectorXd w = Eigen::VectorXd::Unit(d, j % d);
  const double norm = std::sqrt(std::max(0.0, w.dot(k(z_star, z_star) * w)));
  ProbeSeries out;
  out.name = "probe-" + std::to_string(j);
  double e = 0.0;
  double v = 0.0;
  for (const auto& r : rounds) {
    const VectorPoint z{r.x, as_eigen(r.p)};
    const Eigen::VectorXd res = as_eigen(r.y) - z.p;
    e += res.dot(k(z, z_star) * w);
    v += res.dot(k(z, z) * res) + 2.0 * std::max(r.residual, 0.0);
    out.error.push_back(e);
    out.bound.push_back(norm * std::sqrt(v));
  }
  return out;
}

OiReport one_sided(std::string name, double error, double bound, double slack) {
  return OiReport{std::move(name), error, bound, error <= bound + slack};
}

std::vector<OiReport> scalar_reports(const Setup& s, const std::vector<Round>& rounds, std::vector<McCell>* table) {
  const auto& c = s.cfg;
  std::vector<OiReport> out;
  if (rounds.empty()) return out;
  for (int j = 0; j < c.probes; ++j) {
    const auto ps = scalar_probe(s, rounds, j);
    out.push_back(make_report(ps.name, ps.error.back(), ps.bound.back()));
  }
  double worst = 0.0;
  for (const auto& r : rounds) {
    const double t = static_cast<double>(r.t);
    double v;
    if (c.mode == "quantile") {
      // E_{p, y}[S(p)(1{y <= p} - q)] with the exact conditional CDF, against rho / (10 t^2).
      auto term = [&](double p, double sp) { return sp * (s.real->cdf(r.x, p) - c.q); };
      const double e = r.dist.is_point_mass() ? term(r.dist.q, r.s_q)
                                              : r.dist.tau * term(r.dist.q, r.s_q) +
                                                    (1.0 - r.dist.tau) * term(r.dist.q2, r.s_q2);
      v = e - s.real->rho() / (10.0 * t * t);
    } else {
      v = hedging_excess(r.dist, r.s_q, r.s_q2) - 1.0 / (10.0 * t * t);
    }
    worst = std::max(worst, v);
  }
  out.push_back(one_sided(c.mode == "quantile" ? "round-lemma" : "hedging", worst, 0.0, 1e-9));

  const double T = static_cast<double>(rounds.size());
  if (c.mode == "linkpred") {
    const double ref = std::sqrt(static_cast<double>(s.groups->m()) * T + 1.0);
    auto tab = multicalibration_table(rounds, *s.groups, c.bins);
    out.push_back(make_report("mc-table-max", max_abs_cell_error(tab), ref));
    const auto mc = distance_to_multicalibration_bound(rounds, *s.groups, c.bins);
    out.push_back(make_report("kce-multicalibration", mc.kce, mc.reference));
    if (table) *table = std::move(tab);
  }
  if (c.mode == "omni") {
    const double bound = 2.0 * (s.b_kdoi + s.b_khoi) * std::sqrt(T + 1.0);
    for (const auto& loss : s.losses) {
      const auto rr = omni_regret(rounds, loss, s.comparators);
      out.push_back(one_sided("regret-" + loss.name, rr.regret, bound, 1e-9));
      const double doi = decision_oi_error(rounds, loss);
      const double hoi = hypothesis_oi_error(rounds, loss, s.comparators[rr.best_index]);
      out.push_back(one_sided("chain-" + loss.name, rr.regret - (std::fabs(doi) + std::fabs(hoi)), 0.0, 1e-6));
    }
  }
  return out;
}

std::vector<OiReport> vector_reports(const Setup& s, const std::vector<VectorRound>& rounds) {
  std::vector<OiReport> out;
  if (rounds.empty()) return out;
  for (int j = 0; j < s.cfg.probes; ++j) {
    const auto ps = vector_probe(s, rounds, j);
    out.push_back(make_report(ps.name, ps.error.back(), ps.bound.back()));
  }
  double approx = 0.0;
  for (const auto& r : rounds) approx += std::max(r.residual, 0.0);
  out.push_back(OiReport{"residual-sum", approx, 0.0, true});
  return out;
}

bool any_violation(const std::vector<OiReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass) return true;
  return false;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  body(out);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_plot(const fs::path& path, const ProbeSeries& ps, const std::string& title) {
  Series err{"|cumulative OI error|", "#1f77b4", {}, {}, false};
  Series bnd{"bound", "#d62728", {}, {}, true};
  for (std::size_t i = 0; i < ps.error.size(); ++i) {
    err.x.push_back(static_cast<double>(i + 1));
    err.y.push_back(std::fabs(ps.error[i]));
    bnd.x.push_back(static_cast<double>(i + 1));
    bnd.y.push_back(ps.bound[i]);
  }
  write_file(path, [&](std::ostream& o) { write_loglog_svg(o, title, "round t", ps.name, {err, bnd}); });
}

TranscriptHeader make_header(const Setup& s) {
  TranscriptHeader h;
  h.mode = s.cfg.mode;
  h.kernel = kernel_description(s);
  h.seed = s.cfg.seed;
  if (s.cfg.mode == "quantile") {
    h.quantile = s.cfg.q;
    h.y_min = s.cfg.y_min;
    h.y_max = s.cfg.y_max;
  }
  h.context = config_to_json(s.cfg);
  return h;
}

std::string stem_of(const fs::path& transcript) {
  std::string name = transcript.filename().string();
  const std::string suffix = ".transcript.jsonl";
  if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
    return name.substr(0, name.size() - suffix.size());
  return transcript.stem().string();
}

Artifacts finish_scalar(const Setup& s, const std::vector<Round>& rounds, const fs::path& dir, const std::string& stem) {
  Artifacts a;
  std::vector<McCell> table;
  a.reports = scalar_reports(s, rounds, &table);
  a.violation = any_violation(a.reports);
  a.metrics = dir / (stem + ".metrics.csv");
  write_file(a.metrics, [&](std::ostream& o) { write_oi_csv(o, a.reports); });
  if (s.cfg.mode == "linkpred") {
    const fs::path p = dir / (stem + ".mc_table.csv");
    write_file(p, [&](std::ostream& o) { write_mc_table_csv(o, table, *s.groups); });
    a.extra.push_back(p);
  }
  return a;
}

}  // namespace

Artifacts run_experiment(const ExperimentConfig& config, const fs::path& out_dir) {
  config.validate();
  fs::create_directories(out_dir);
  const auto& c = config;
  if (c.mode == "batch") {
    Artifacts a;
    a.metrics = out_dir / (c.name + ".metrics.csv");
    const fs::path alpha = out_dir / (c.name + ".alpha.csv");
    const double value = batch_learn(c.sample, c.kernel, c.radius, alpha);
    a.reports.push_back(OiReport{"ball-value", value, c.radius, true});
    write_file(a.metrics, [&](std::ostream& o) { write_oi_csv(o, a.reports); });
    a.extra.push_back(alpha);
    return a;
  }

  Setup s = make_setup(c);
  const fs::path transcript = out_dir / (c.name + ".transcript.jsonl");
  Artifacts a;
  if (c.mode == "vector") {
    auto nature = make_vector_noise(*s.box, c.nature.noise, c.seed);
    VectorPredictor pred(*s.matrix, *s.box, VectorSolverOptions{c.max_iter});
    VectorTranscript tr;
    tr.header = make_header(s);
    tr.lower = c.lower;
    tr.upper = c.upper;
    tr.rounds = simulate(*nature, pred, c.T);
    write_file(transcript, [&](std::ostream& o) { write_vector_transcript(o, tr); });
    a.reports = vector_reports(s, tr.rounds);
    a.violation = any_violation(a.reports);
    a.metrics = out_dir / (c.name + ".metrics.csv");
    write_file(a.metrics, [&](std::ostream& o) { write_oi_csv(o, a.reports); });
    a.plot = out_dir / (c.name + ".svg");
    write_plot(a.plot, vector_probe(s, tr.rounds, 0), c.name + " (vector)");
    a.transcript = transcript;
    return a;
  }

  Transcript tr;
  tr.header = make_header(s);
  if (c.mode == "quantile") {
    QuantilePredictor pred(s.kernel, QuantileConfig{c.q, c.y_min, c.y_max}, c.seed);
    tr.rounds = simulate(*make_real(c), pred, c.T);
  } else {
    std::unique_ptr<BinarySimulator> nature;
    std::ofstream graph_out;
    if (c.mode == "linkpred") {
      const fs::path gp = out_dir / (c.name + ".graph.txt");
      graph_out.open(gp, std::ios::binary);
      if (!graph_out) throw std::runtime_error("cannot write '" + gp.string() + "'");
      nature = std::make_unique<GraphEvolution>(c.nature.graph, c.seed, &graph_out);
      a.extra.push_back(gp);
    } else if (c.nature.kind == "iid-bernoulli") {
      nature = make_iid_bernoulli(c.nature.theta, c.seed, c.nature.bits);
    } else if (c.nature.kind == "contrarian") {
      nature = make_contrarian(c.seed, c.nature.bits);
    } else if (c.nature.kind == "performative-sigmoid") {
      nature = make_performative_sigmoid(c.nature.a, c.nature.b, c.seed, c.nature.bits);
    } else {
      nature = make_logistic(c);
    }
    BinaryPredictor pred(s.kernel, c.seed);
    tr.rounds = simulate(*nature, pred, c.T);
  }
  write_file(transcript, [&](std::ostream& o) { write_transcript(o, tr); });
  auto fin = finish_scalar(s, tr.rounds, out_dir, c.name);
  fin.extra.insert(fin.extra.begin(), a.extra.begin(), a.extra.end());
  fin.transcript = transcript;
  fin.plot = out_dir / (c.name + ".svg");
  write_plot(fin.plot, scalar_probe(s, tr.rounds, 0), c.name + " (" + c.mode + ")");
  return fin;
}

Artifacts evaluate_transcript(const fs::path& transcript, const fs::path& out_dir, std::ostream& warn) {
  std::ifstream in(transcript, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open transcript '" + transcript.string() + "'");
  const std::string mode = peek_transcript_mode(in);
  in.clear();
  in.seekg(0);
  fs::create_directories(out_dir);
  const std::string stem = stem_of(transcript);
  auto check_hash = [&](const TranscriptHeader& h, const Setup& s) {
    const std::string expected = kernel_hash(kernel_description(s));
    if (h.stored_hash != expected)
      warn << "warning: kernel hash " << h.stored_hash << " does not match the configured kernel (" << expected
           << "); evaluating anyway\n";
  };
  if (mode == "vector") {
    const auto tr = read_vector_transcript(in);
    const Setup s = make_setup(config_from_json(tr.header.context));
    check_hash(tr.header, s);
    Artifacts a;
    a.transcript = transcript;
    a.reports = vector_reports(s, tr.rounds);
    a.violation = any_violation(a.reports);
    a.metrics = out_dir / (stem + ".metrics.csv");
    write_file(a.metrics, [&](std::ostream& o) { write_oi_csv(o, a.reports); });
    return a;
  }
  const auto tr = read_transcript(in);
  const Setup s = make_setup(config_from_json(tr.header.context));
  check_hash(tr.header, s);
  auto a = finish_scalar(s, tr.rounds, out_dir, stem);
  a.transcript = transcript;
  return a;
}

void plot_transcript(const fs::path& transcript, const fs::path& svg) {
  std::ifstream in(transcript, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open transcript '" + transcript.string() + "'");
  const std::string mode = peek_transcript_mode(in);
  in.clear();
  in.seekg(0);
  if (mode == "vector") {
    const auto tr = read_vector_transcript(in);
    const Setup s = make_setup(config_from_json(tr.header.context));
    if (tr.rounds.empty()) throw std::runtime_error("transcript has no rounds");
    write_plot(svg, vector_probe(s, tr.rounds, 0), stem_of(transcript) + " (vector)");
    return;
  }
  const auto tr = read_transcript(in);
  const Setup s = make_setup(config_from_json(tr.header.context));
  if (tr.rounds.empty()) throw std::runtime_error("transcript has no rounds");
  write_plot(svg, scalar_probe(s, tr.rounds, 0), stem_of(transcript) + " (" + mode + ")");
}

bool run_replications(const ExperimentConfig& config, const fs::path& out_dir, int replications) {
  if (replications < 1) throw ConfigError("replications must be positive");
  std::vector<Artifacts> results(static_cast<std::size_t>(replications));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(replications));
  const unsigned workers = std::max(1U, std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(replications)));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int r = static_cast<int>(w); r < replications; r += static_cast<int>(workers)) {
        try {
          ExperimentConfig c = config;
          c.seed = config.seed + static_cast<std::uint64_t>(r);
          results[static_cast<std::size_t>(r)] = run_experiment(c, out_dir / ("rep-" + std::to_string(r)));
        } catch (...) {
          errors[static_cast<std::size_t>(r)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  bool violation = false;
  write_file(out_dir / (config.name + ".replications.csv"), [&](std::ostream& o) {
    o << "schema_version,replication,seed,distinguisher,error,bound,pass\n";
    for (int r = 0; r < replications; ++r) {
      const auto& a = results[static_cast<std::size_t>(r)];
      violation = violation || a.violation;
      for (const auto& rep : a.reports)
        o << kReportSchemaVersion << ',' << r << ',' << config.seed + static_cast<std::uint64_t>(r) << ',' << rep.name
          << ',' << format_number(rep.error) << ',' << format_number(rep.bound) << ',' << (rep.pass ? 1 : 0) << '\n';
    }
  });
  return violation;
}

double batch_learn(const std::string& sample_csv, const std::string& kernel, double radius, const fs::path& alpha_csv) {
  std::ifstream in(sample_csv);
  if (!in) throw ConfigError("cannot open sample '" + sample_csv + "'");
  const auto sample = read_sample_csv(in);
  const auto sol = rkhs_ball_learner(sample, parse_kernel(kernel), radius);
  write_file(alpha_csv, [&](std::ostream& o) { write_alpha_csv(o, sol); });
  return sol.value;
}

}  // namespace anykernel::cli
