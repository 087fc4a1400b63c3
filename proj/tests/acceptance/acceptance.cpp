// Acceptance gate: one PASS/FAIL line per criterion. Exit status is nonzero if any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include <anykernel/batch.hpp>
#include <anykernel/binary.hpp>
#include <anykernel/eval.hpp>
#include <anykernel/gram.hpp>
#include <anykernel/graph_kernels.hpp>
#include <anykernel/nature.hpp>
#include <anykernel/omni.hpp>
#include <anykernel/quantile.hpp>
#include <anykernel/transcript.hpp>
#include <anykernel/vector.hpp>

#include "anykernel_cli/config.hpp"
#include "anykernel_cli/experiment.hpp"
#include "oracles.hpp"
#include "shipped.hpp"

using namespace anykernel;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;
std::map<int, std::string> lines;

// Progress goes to stderr as criteria finish; stdout gets the lines in criterion order at the end.
void verdict(int id, bool pass, const std::string& detail) {
  char head[32];
  std::snprintf(head, sizeof(head), "criterion %2d: %s  ", id, pass ? "PASS" : "FAIL");
  lines[id] = head + detail;
  std::fprintf(stderr, "%s\n", lines[id].c_str());
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Transcript load(const fs::path& p) {
  std::ifstream in(p);
  return read_transcript(in);
}

// Criterion 2 bookkeeping, shared by every binary run.
struct HedgeAudit {
  std::int64_t rounds = 0;
  std::int64_t runs = 0;
  double worst_excess = -1e300;  // max of value - 1/(10 t^2)
  double worst_s_mismatch = 0.0;
  std::int64_t s_checked = 0;

  // Every round uses the recorded S values; every 97th round recomputes them from the raw history.
  void audit(const std::vector<Round>& rs, const Kernel& k) {
    ++runs;
    for (const auto& r : rs) {
      const double t = static_cast<double>(r.t);
      for (double y : {0.0, 1.0}) {
        const double v = r.dist.tau * r.s_q * (y - r.dist.q) + (1.0 - r.dist.tau) * r.s_q2 * (y - r.dist.q2);
        worst_excess = std::max(worst_excess, v - 1.0 / (10.0 * t * t));
      }
      ++rounds;
      if (r.t % 97 == 1) {
        for (auto [p, s] : {std::pair{r.dist.q, r.s_q}, std::pair{r.dist.q2, r.s_q2}}) {
          const double direct = oracle::binary_s(k, rs, r.t, r.x, p);
          worst_s_mismatch = std::max(worst_s_mismatch, std::fabs(direct - s) / (1.0 + std::fabs(direct)));
        }
        ++s_checked;
      }
    }
  }
};

HedgeAudit hedging;

void criterion1() {
  const std::int64_t T = 10000;
  const double bound = calibration_bound(T);
  double worst = 0.0;
  bool ok = true;
  const auto start = Clock::now();
  std::vector<std::vector<Round>> runs;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    BinaryPredictor pred(constant_kernel(1.0), seed);
    auto nature = make_contrarian(seed);
    runs.push_back(simulate(*nature, pred, T));
  }
  const double elapsed = seconds_since(start);
  for (const auto& rs : runs) {
    const double err = std::fabs(oi_error(rs, [](const Point&) { return 1.0; }));
    worst = std::max(worst, err);
    ok = ok && err <= bound;
    hedging.audit(rs, constant_kernel(1.0));
  }
  verdict(1, ok && elapsed < 60.0,
          "calibration, k = 1 vs contrarian, T = 10000, 20 seeds: max |sum(y - Ep)| = " + fmt("%.4f", worst) +
              " <= " + fmt("%.4f", bound) + ", runtime " + fmt("%.2f", elapsed) + " s < 60 s");
}

GroupFamily graph_groups() {
  GraphEvolutionParams p;
  std::vector<std::size_t> idx;
  for (int k = 0; k < p.communities + p.roles; ++k) idx.push_back(static_cast<std::size_t>(k));
  return GroupFamily::from_feature_indices(idx, 2);
}

cli::ExperimentConfig linkpred_config() {
  auto c = cli::preset_config("linkpred-groups");
  c.T = 20000;
  c.seed = 3;
  c.name = "linkpred";
  return c;
}

cli::ExperimentConfig omni_config() {
  auto c = cli::preset_config("omni-logistic");
  c.T = 10000;
  c.seed = 6;
  c.name = "omni";
  return c;
}

std::vector<Round> criterion3(const fs::path& dir, fs::path& transcript_out) {
  const auto cfg = linkpred_config();
  const auto start = Clock::now();
  const auto art = cli::run_experiment(cfg, dir);
  const double elapsed = seconds_since(start);
  transcript_out = art.transcript;
  auto rounds = load(art.transcript).rounds;
  const auto groups = graph_groups();
  const double m = static_cast<double>(groups.size());
  const double bound = std::sqrt(m * static_cast<double>(cfg.T) + 1.0);
  const auto table = multicalibration_table(rounds, groups, cfg.bins);
  const double worst = max_abs_cell_error(table);
  // Spot-check the table against direct loops on the extreme cell.
  double direct = 0.0;
  for (const auto& c : table)
    if (std::fabs(c.error) == worst) direct = std::fabs(oracle::mc_cell(rounds, groups, c.g, c.g2, c.bin, cfg.bins));
  hedging.audit(rounds, pair_groups_kernel(groups, cfg.bins));
  verdict(3, worst <= bound && std::fabs(direct - worst) <= 1e-9 && elapsed < 600.0,
          "multicalibration, 6 groups, 10 bins, T = 20000: max cell |error| = " + fmt("%.4f", worst) + " <= " +
              fmt("%.4f", bound) + ", runtime " + fmt("%.1f", elapsed) + " s < 600 s");
  return rounds;
}

struct Tree {
  int root = 0, left = 0, right = 0;
  double leaf[4] = {0, 0, 0, 0};
  double operator()(const BitVector& x) const {
    const bool a = x.bits[static_cast<std::size_t>(root)] > 0;
    const bool b = x.bits[static_cast<std::size_t>(a ? right : left)] > 0;
    return leaf[(a ? 2 : 0) + (b ? 1 : 0)];
  }
};

void criterion4() {
  const int n = 8, d = 2;
  const std::int64_t T = 10000;
  const auto k = low_degree_kernel(n, d);
  LogisticNature nature({0.9, -0.7, 0.5, 0.4, -0.3, 0.25, -0.2, 0.1}, 0.1, 4);
  BinaryPredictor pred(k, 4);
  const auto rounds = simulate(nature, pred, T);
  hedging.audit(rounds, k);

  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> var(0, n - 1);
  std::uniform_real_distribution<double> leaf(-1.0, 1.0);
  const double bound = 6.0 * std::sqrt(std::pow(n, d) * static_cast<double>(T));
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Tree tr;
    tr.root = var(rng);
    do tr.left = var(rng); while (tr.left == tr.root);
    do tr.right = var(rng); while (tr.right == tr.root);
    for (double& v : tr.leaf) v = leaf(rng);
    double err = 0.0;
    for (const auto& r : rounds) err += (r.y - r.dist.mean()) * tr(r.x.bits());
    worst = std::max(worst, std::fabs(err));
  }
  verdict(4, worst <= bound,
          "low-degree OI, n = 8, d = 2, 100 depth-2 trees, T = 10000: max |OI error| = " + fmt("%.4f", worst) +
              " <= 6 sqrt(n^d T) = " + fmt("%.1f", bound));
}

void criterion5() {
  const std::int64_t T = 10000;
  bool ok = true;
  std::string detail;
  double worst_lemma = -1e300;
  for (double q : {0.1, 0.5, 0.9}) {
    auto nature = make_truncated_gaussian(0.0, 1.0, 0.15, 5);
    QuantilePredictor pred(constant_kernel(1.0), QuantileConfig{q, 0.0, 1.0}, 5);
    const auto rounds = simulate(*nature, pred, T);
    const double rho = nature->rho();
    const double err = std::fabs(quantile_oi_error(rounds, q, [](const Point&) { return 1.0; }));
    const double bound = std::sqrt(rho + q * (1.0 - q) * static_cast<double>(T));
    ok = ok && err <= bound;
    for (const auto& r : rounds) {
      // Exact expectation over y ~ F(. | x_t) of E_{p ~ Delta_t} S(p)(1{y <= p} - q).
      const double t = static_cast<double>(r.t);
      const double v = r.dist.tau * r.s_q * (nature->cdf(r.x, r.dist.q) - q) +
                       (1.0 - r.dist.tau) * r.s_q2 * (nature->cdf(r.x, r.dist.q2) - q);
      const double excess = v - rho / (10.0 * t * t);
      worst_lemma = std::max(worst_lemma, excess);
      ok = ok && excess <= 0.0;
      if (r.t % 97 == 1) {
        const double s = oracle::quantile_s(constant_kernel(1.0), rounds, r.t, r.x, r.dist.q, q);
        ok = ok && std::fabs(s - r.s_q) <= 1e-9 * (1.0 + std::fabs(s));
      }
    }
    detail += "q=" + fmt("%.1f", q) + ": " + fmt("%.3f", err) + " <= " + fmt("%.3f", bound) + "; ";
  }
  verdict(5, ok,
          "quantile, truncated Gaussian, T = 10000: |sum E(1{y<=p} - q)| " + detail +
              "max per-round lemma excess over rho/(10t^2) = " + fmt("%.3g", worst_lemma) + " <= 0");
}

std::vector<Comparator> omni_comparators(const cli::ExperimentConfig& c) {
  auto nature = std::make_shared<LogisticNature>(c.nature.weights, c.nature.bias, c.seed);
  return {
      {"bayes", [nature](const Features& x) { return nature->bayes(x); }, -1.0, 1.0},
      {"zero", [](const Features&) { return 0.0; }, -1.0, 1.0},
      {"one", [](const Features&) { return 1.0; }, -1.0, 1.0},
      {"half", [](const Features&) { return 0.5; }, -1.0, 1.0},
      {"first-coordinate", [](const Features& x) { return 1.0 / (1.0 + std::exp(-2.0 * x.bits().bits[0])); }, -1.0,
       1.0},
  };
}

void criterion6(const fs::path& dir, fs::path& transcript_out) {
  const auto cfg = omni_config();
  const auto art = cli::run_experiment(cfg, dir);
  transcript_out = art.transcript;
  const auto rounds = load(art.transcript).rounds;
  std::vector<Loss> losses;
  for (const auto& name : cfg.losses) losses.push_back(named_loss(name));
  const auto comps = omni_comparators(cfg);
  const auto doi = kdoi_kernel(losses);
  const auto hoi = khoi_kernel(losses, ComparatorSet{comps, std::nullopt});
  const double bound = 2.0 * (doi.bound + hoi.bound) * std::sqrt(static_cast<double>(cfg.T) + 1.0);
  hedging.audit(rounds, doi.kernel + hoi.kernel);

  bool ok = true;
  double worst_chain = -1e300;
  std::string detail;
  for (const auto& loss : losses) {
    const auto rep = omni_regret(rounds, loss, comps);
    ok = ok && rep.regret <= bound;
    const double d = decision_oi_error(rounds, loss);
    // The chain holds against every comparator, so check them all.
    double alg = rep.algorithm_loss;
    for (const auto& h : comps) {
      double loss_h = 0.0;
      for (const auto& r : rounds) loss_h += loss(r.x, h(r.x), r.y);
      const double regret_h = alg - loss_h;
      const double hh = hypothesis_oi_error(rounds, loss, h);
      worst_chain = std::max({worst_chain, regret_h - (d - hh), regret_h - (std::fabs(d) + std::fabs(hh))});
    }
    detail += loss.name + " " + fmt("%.3f", rep.regret) + "; ";
  }
  ok = ok && worst_chain <= 1e-6;
  verdict(6, ok,
          "omniprediction, T = 10000, 5 comparators: regret " + detail + "bound 2(B_KDOI + B_KHOI) sqrt(T+1) = " +
              fmt("%.2f", bound) + "; max chain violation " + fmt("%.3g", worst_chain) + " <= 1e-6");
}

void criterion2() {
  verdict(2, hedging.worst_excess <= 1e-9 && hedging.worst_s_mismatch <= 1e-9,
          "per-round hedging on " + std::to_string(hedging.rounds) + " rounds of " + std::to_string(hedging.runs) +
              " runs: max excess over 1/(10t^2) = " + fmt("%.3g", hedging.worst_excess) +
              " <= 1e-9; recorded S vs direct sum on " + std::to_string(hedging.s_checked) +
              " rounds, max rel. diff " + fmt("%.3g", hedging.worst_s_mismatch));
}

void criterion7() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  int bad_lowdeg = 0, bad_iso = 0, bad_vi = 0, bad_pga = 0, bad_post = 0;

  std::uniform_int_distribution<int> nd(1, 10);
  for (int i = 0; i < 1000; ++i) {
    const int n = nd(rng);
    const int d = std::uniform_int_distribution<int>(0, std::min(3, n))(rng);
    const auto x = oracle::random_bits(rng, n), y = oracle::random_bits(rng, n);
    bad_lowdeg += low_degree_boolean(x, y, d) != oracle::low_degree_subsets(x, y, d);
  }

  const auto iso = isomorphism_kernel(10);
  std::uniform_int_distribution<int> size(2, 7);
  std::bernoulli_distribution copy(0.5);
  for (int i = 0; i < 500; ++i) {
    const int n = size(rng);
    const auto raw = oracle::random_element(rng, n, 0.4);
    const auto other = copy(rng) ? oracle::relabel(raw, rng) : oracle::random_element(rng, n, 0.4);
    const auto a = make_element(raw), b = make_element(other);
    const double v = iso(Point{Features(a), 0.5}, Point{Features(b), 0.5});
    bad_iso += v != (oracle::isomorphic_marked(*a, *b) ? 1.0 : 0.0);
  }

  std::uniform_int_distribution<int> dim(1, 4);
  for (int i = 0; i < 1000; ++i) {
    const int d = dim(rng);
    Eigen::VectorXd lo(d), hi(d), p(d), s(d);
    for (int j = 0; j < d; ++j) {
      lo[j] = g(rng);
      hi[j] = lo[j] + 0.1 + u(rng);
      p[j] = lo[j] + (hi[j] - lo[j]) * u(rng);
      s[j] = g(rng);
    }
    bad_vi += std::fabs(vi_residual(p, s, OutcomeBox{lo, hi}) - oracle::vi_residual_vertices(p, s, lo, hi)) > 1e-12;
  }

  std::uniform_int_distribution<int> nsize(2, 50);
  for (int i = 0; i < 100; ++i) {
    const int n = nsize(rng);
    std::vector<Point> pts;
    Eigen::VectorXd y(n);
    for (int j = 0; j < n; ++j) {
      pts.push_back(Point{Features(DenseVector{g(rng), g(rng)}), 0.0});
      y[j] = 2.0 * u(rng) - 1.0;
    }
    const auto gram = gram_matrix(gaussian_kernel(1.0), pts).entries;
    const double radius = 0.5 + u(rng);
    const auto s = rkhs_ball_learner(gram, y, radius);
    const auto pga = oracle::rkhs_ball_pga(gram, y, radius, 10000, static_cast<std::uint64_t>(i));
    bad_pga += std::fabs(s.value - pga.value) > 1e-6 || (gram * s.alpha - pga.fitted).cwiseAbs().maxCoeff() > 1e-6;
  }

  for (int i = 0; i < 100; ++i) {
    const double power = 1.2 + 2.0 * u(rng), shift = 0.3 * u(rng), p = u(rng);
    Loss l;
    l.name = "power";
    l.fn = [power, shift](const Features&, double yhat, double y) {
      return std::pow(std::fabs(yhat - (y == 1.0 ? 1.0 - shift : shift)), power);
    };
    l.strategy = PostProcess::kConvexTernary;
    l.tags.strongly_convex = 0.5;
    const auto obj = [&](double a, double y) { return l(Features{}, a, y); };
    bad_post += std::fabs(post_process(l, Features{}, p) - oracle::grid_argmin(obj, p, 100000)) > 1e-4;
  }

  verdict(7, bad_lowdeg + bad_iso + bad_vi + bad_pga + bad_post == 0,
          "oracles, mismatches: low-degree " + std::to_string(bad_lowdeg) + "/1000, isomorphism " +
              std::to_string(bad_iso) + "/500, vi_residual " + std::to_string(bad_vi) + "/1000, ball learner " +
              std::to_string(bad_pga) + "/100, convex post-process " + std::to_string(bad_post) + "/100");
}

bool psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -1e-8 * (1.0 + m.trace());
}

void criterion8() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> size(1, 12);
  int kernels = 0, bad = 0;
  std::string failed;
  for (const auto& c : shipped::scalar_cases()) {
    ++kernels;
    int local = 0;
    for (int i = 0; i < 200; ++i) {
      std::vector<Point> pts;
      const int n = size(rng);
      for (int j = 0; j < n; ++j) pts.push_back(c.sample(rng));
      Eigen::MatrixXd m(n, n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) m(a, b) = c.kernel(pts[a], pts[b]);
      local += !psd(m);
    }
    if (local) failed += " " + c.name;
    bad += local;
  }
  for (const auto& c : shipped::matrix_cases()) {
    ++kernels;
    int local = 0;
    for (int i = 0; i < 200; ++i) {
      std::vector<VectorPoint> pts;
      const int n = size(rng);
      for (int j = 0; j < n; ++j) pts.push_back(c.sample(rng));
      const int d = c.kernel.dim();
      Eigen::MatrixXd m(n * d, n * d);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) m.block(a * d, b * d, d, d) = c.kernel(pts[a], pts[b]);
      local += !psd(m);
    }
    if (local) failed += " " + c.name;
    bad += local;
  }
  verdict(8, bad == 0,
          "PSD, " + std::to_string(kernels) + " shipped kernels x 200 Gram matrices of size <= 12: " +
              std::to_string(bad) + " below -1e-8 (1 + trace)" + (failed.empty() ? "" : " in" + failed));
}

void criterion9(const std::vector<Round>& run3) {
  const auto groups = graph_groups();
  const auto k = multicalibration_kernel(groups);
  const double m = static_cast<double>(groups.size());
  const double T = static_cast<double>(run3.size());
  const double kce = kernel_calibration_error(run3, k);
  const double bound = std::sqrt(m * T + 1.0);

  // Negative control: p = 1/2 everywhere, y depends on the community of i.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Round> control = run3;
  for (auto& r : control) {
    const bool first = groups.contains(0, r.x.element().features_i());
    r.dist = PredictionDistribution::point_mass(0.5);
    r.p = 0.5;
    r.y = u(rng) < (first ? 0.9 : 0.1) ? 1.0 : 0.0;
  }
  const double control_kce = kernel_calibration_error(control, k);
  const double floor = 0.5 * std::sqrt(m * T);
  verdict(9, kce <= bound && control_kce > floor,
          "kCE under Laplace x group-pair kernel on run 3 = " + fmt("%.4f", kce) + " <= sqrt(mT+1) = " +
              fmt("%.4f", bound) + "; miscalibrated control = " + fmt("%.2f", control_kce) + " > 0.5 sqrt(mT) = " +
              fmt("%.2f", floor));
}

void criterion10(const fs::path& dir, const fs::path& lp_transcript, const fs::path& omni_transcript) {
  bool ok = true;
  std::string detail;
  auto compare = [&](const cli::ExperimentConfig& cfg, const fs::path& first_transcript, const std::string& sub) {
    const auto again = cli::run_experiment(cfg, dir / sub);
    auto metrics = first_transcript;
    metrics.replace_filename(cfg.name + ".metrics.csv");
    const bool same = slurp(again.transcript) == slurp(first_transcript) && slurp(again.metrics) == slurp(metrics);
    ok = ok && same;
    detail += (detail.empty() ? "" : "; ") + cfg.name + (same ? " identical" : " DIFFERS");
  };
  compare(linkpred_config(), lp_transcript, "repeat-linkpred");
  compare(omni_config(), omni_transcript, "repeat-omni");

  auto calib = cli::preset_config("calibration-adversary");
  calib.seed = 1;
  calib.name = "calibration";
  const auto first = cli::run_experiment(calib, dir / "calibration");
  compare(calib, first.transcript, "repeat-calibration");

  auto quant = cli::preset_config("quantile-gaussian");
  quant.seed = 5;
  quant.q = 0.5;
  quant.name = "quantile";
  const auto qfirst = cli::run_experiment(quant, dir / "quantile");
  compare(quant, qfirst.transcript, "repeat-quantile");
  verdict(10, ok, "determinism, rerun with the same seed: " + detail);
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance-out");
  fs::remove_all(dir);
  fs::create_directories(dir);
  try {
    criterion1();
    fs::path lp_transcript, omni_transcript;
    const auto run3 = criterion3(dir / "linkpred", lp_transcript);
    criterion4();
    criterion5();
    criterion6(dir / "omni", omni_transcript);
    criterion2();
    criterion7();
    criterion8();
    criterion9(run3);
    criterion10(dir, lp_transcript, omni_transcript);
  } catch (const std::exception& e) {
    for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
