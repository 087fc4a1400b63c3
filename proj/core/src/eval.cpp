#include "anykernel/eval.hpp"

#include <bit>
#include <cmath>
#include <ostream>

#include "anykernel/errors.hpp"
#include "anykernel/graph_kernels.hpp"

namespace anykernel {

namespace {

double finish_kce(double sq) {
  if (sq < 0.0) {
    if (sq < -1e-9) throw PsdError("negative kernel calibration radicand " + format_number(sq));
    return 0.0;
  }
  return std::sqrt(sq);
}

Eigen::VectorXd eig(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

double oi_error(const std::vector<Round>& rounds, const Distinguisher& f) {
  double s = 0.0;
  for (const auto& r : rounds) s += r.dist.expect([&](double p) { return (r.y - p) * f(Point{r.x, p}); });
  return s;
}

double quantile_oi_error(const std::vector<Round>& rounds, double q, const Distinguisher& f) {
  double s = 0.0;
  for (const auto& r : rounds)
    s += r.dist.expect([&](double p) { return quantile_residual(r.y, p, q) * f(Point{r.x, p}); });
  return s;
}

OiReport make_report(std::string name, double error, double bound, double slack) {
  return OiReport{std::move(name), error, bound, std::fabs(error) <= bound + slack};
}

double representer_bound(const std::vector<Round>& rounds, const Kernel& k, const Point& z_star) {
  double s = 1.0;
  for (const auto& r : rounds) s += r.dist.expect([&](double p) { return p * (1.0 - p) * k.diag(Point{r.x, p}); });
  return std::sqrt(k.diag(z_star)) * std::sqrt(s);
}

double quantile_representer_bound(const std::vector<Round>& rounds, const Kernel& k, const Point& z_star, double q,
                                  double rho) {
  double s = rho;
  for (const auto& r : rounds) s += r.dist.expect([&](double p) { return q * (1.0 - q) * k.diag(Point{r.x, p}); });
  return std::sqrt(k.diag(z_star)) * std::sqrt(s);
}

double kernel_calibration_error(const std::vector<Round>& rounds, const Kernel& k) {
  const std::size_t n = rounds.size();
  std::vector<Point> z(n);
  std::vector<double> w(n);
  for (std::size_t t = 0; t < n; ++t) {
    z[t] = Point{rounds[t].x, rounds[t].p};
    w[t] = rounds[t].y - rounds[t].p;
  }
  double sq = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    if (w[t] == 0.0) continue;
    double row = 0.0;
    for (std::size_t s = 0; s < t; ++s)
      if (w[s] != 0.0) row += w[s] * k(z[t], z[s]);
    sq += w[t] * (2.0 * row + w[t] * k.diag(z[t]));
  }
  return finish_kce(sq);
}

Kernel multicalibration_kernel(const GroupFamily& groups) {
  return product_kernel({laplace_kernel(), group_pair_count_kernel(groups)});
}

MulticalibrationBound distance_to_multicalibration_bound(const std::vector<Round>& rounds, const GroupFamily& groups,
                                                         int n_bins) {
  if (n_bins < 1) throw DomainError("need at least one bin");
  const std::size_t n = rounds.size();
  std::vector<std::uint64_t> gi(n), gj(n);
  std::vector<double> p(n), w(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto& u = rounds[t].x.element();
    gi[t] = groups.membership(u.features_i());
    gj[t] = groups.membership(u.features_j());
    p[t] = rounds[t].p;
    w[t] = rounds[t].y - rounds[t].p;
  }
  // Same value as kernel_calibration_error with multicalibration_kernel, without per-pair dispatch.
  double sq = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    if (w[t] == 0.0) continue;
    double row = 0.0;
    for (std::size_t s = 0; s < t; ++s) {
      if (w[s] == 0.0) continue;
      const int a = std::popcount(gi[t] & gi[s]);
      if (a == 0) continue;
      const int b = std::popcount(gj[t] & gj[s]);
      if (b == 0) continue;
      row += w[s] * (std::exp(-std::fabs(p[t] - p[s])) * static_cast<double>(a * b));
    }
    const double diag = static_cast<double>(std::popcount(gi[t]) * std::popcount(gj[t]));
    sq += w[t] * (2.0 * row + w[t] * diag);
  }
  MulticalibrationBound out;
  out.kce = finish_kce(sq);
  out.reference = std::sqrt(static_cast<double>(groups.m()) * static_cast<double>(n) + 1.0);
  return out;
}

std::vector<McCell> multicalibration_table(const std::vector<Round>& rounds, const GroupFamily& groups, int n_bins) {
  if (n_bins < 1) throw DomainError("need at least one bin");
  const std::size_t G = groups.size();
  const auto N = static_cast<std::size_t>(n_bins);
  std::vector<McCell> table(G * G * N);
  for (std::size_t g = 0; g < G; ++g)
    for (std::size_t h = 0; h < G; ++h)
      for (std::size_t r = 0; r < N; ++r) {
        auto& c = table[(g * G + h) * N + r];
        c.g = g;
        c.g2 = h;
        c.bin = static_cast<int>(r);
      }
  for (const auto& rd : rounds) {
    const auto& u = rd.x.element();
    const std::uint64_t mi = groups.membership(u.features_i());
    const std::uint64_t mj = groups.membership(u.features_j());
    if (mi == 0 || mj == 0) continue;
    const bool two = !rd.dist.is_point_mass();
    const int b1 = grid_bin_index(rd.dist.q, n_bins);
    const int b2 = two ? grid_bin_index(rd.dist.q2, n_bins) : b1;
    for (std::size_t g = 0; g < G; ++g) {
      if (!((mi >> g) & 1U)) continue;
      for (std::size_t h = 0; h < G; ++h) {
        if (!((mj >> h) & 1U)) continue;
        McCell* base = &table[(g * G + h) * N];
        if (!two) {
          base[b1].error += rd.y - rd.dist.q;
          base[b1].mass += 1.0;
          base[b1].count += 1;
          continue;
        }
        base[b1].error += rd.dist.tau * (rd.y - rd.dist.q);
        base[b1].mass += rd.dist.tau;
        base[b2].error += (1.0 - rd.dist.tau) * (rd.y - rd.dist.q2);
        base[b2].mass += 1.0 - rd.dist.tau;
        base[b1].count += 1;
        if (b2 != b1) base[b2].count += 1;
      }
    }
  }
  return table;
}

double max_abs_cell_error(const std::vector<McCell>& table) {
  double m = 0.0;
  for (const auto& c : table) m = std::max(m, std::fabs(c.error));
  return m;
}

double vector_probe_error(const std::vector<VectorRound>& rounds, const MatrixKernel& k, const VectorPoint& z_star,
                          const Eigen::VectorXd& w) {
  double s = 0.0;
  for (const auto& r : rounds) {
    const VectorPoint z{r.x, eig(r.p)};
    s += (eig(r.y) - z.p).dot(k(z, z_star) * w);
  }
  return s;
}

double vector_probe_bound(const std::vector<VectorRound>& rounds, const MatrixKernel& k, const VectorPoint& z_star,
                          const Eigen::VectorXd& w) {
  const double norm = std::sqrt(std::max(0.0, w.dot(k(z_star, z_star) * w)));
  double s = 0.0;
  for (const auto& r : rounds) {
    const VectorPoint z{r.x, eig(r.p)};
    const Eigen::VectorXd res = eig(r.y) - z.p;
    s += res.dot(k(z, z) * res) + 2.0 * std::max(r.residual, 0.0);
  }
  return norm * std::sqrt(s);
}

std::vector<Round> simulate(BinarySimulator& nature, BinaryPredictor& predictor, std::int64_t T) {
  auto fn = [&](std::int64_t t, const Features& x, const PredictionDistribution& d) { return nature.outcome(t, x, d); };
  for (std::int64_t t = predictor.next_round(); t <= T; ++t) predictor.step(nature.features(t), fn);
  nature.finish();
  return predictor.rounds();
}

std::vector<Round> simulate(RealSimulator& nature, QuantilePredictor& predictor, std::int64_t T) {
  auto fn = [&](std::int64_t t, const Features& x, const PredictionDistribution& d) { return nature.outcome(t, x, d); };
  for (std::int64_t t = predictor.next_round(); t <= T; ++t) predictor.step(nature.features(t), fn);
  return predictor.rounds();
}

std::vector<VectorRound> simulate(VectorSimulator& nature, VectorPredictor& predictor, std::int64_t T) {
  auto fn = [&](std::int64_t t, const Features& x, const Eigen::VectorXd& p) { return nature.outcome(t, x, p); };
  for (std::int64_t t = predictor.next_round(); t <= T; ++t) predictor.step(nature.features(t), fn);
  return predictor.rounds();
}

void write_oi_csv(std::ostream& out, const std::vector<OiReport>& reports) {
  out << "schema_version,distinguisher,error,bound,pass\n";
  for (const auto& r : reports)
    out << kReportSchemaVersion << ',' << r.name << ',' << format_number(r.error) << ',' << format_number(r.bound) << ','
        << (r.pass ? 1 : 0) << '\n';
}

void write_mc_table_csv(std::ostream& out, const std::vector<McCell>& table, const GroupFamily& groups) {
  out << "schema_version,group_i,group_j,bin,error,mass,count\n";
  for (const auto& c : table)
    out << kReportSchemaVersion << ',' << groups.name(c.g) << ',' << groups.name(c.g2) << ',' << c.bin << ','
        << format_number(c.error) << ',' << format_number(c.mass) << ',' << c.count << '\n';
}

}  // namespace anykernel
