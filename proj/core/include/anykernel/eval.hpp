#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "anykernel/binary.hpp"
#include "anykernel/graph.hpp"
#include "anykernel/kernel.hpp"
#include "anykernel/nature.hpp"
#include "anykernel/quantile.hpp"
#include "anykernel/transcript.hpp"
#include "anykernel/vector.hpp"

namespace anykernel {

inline constexpr int kReportSchemaVersion = 1;

using Distinguisher = std::function<double(const Point&)>;

// sum_t E_{p ~ Delta_t} (y_t - p) f(x_t, p).
double oi_error(const std::vector<Round>& rounds, const Distinguisher& f);
// sum_t E_{p ~ Delta_t} (1{y_t <= p} - q) f(x_t, p).
double quantile_oi_error(const std::vector<Round>& rounds, double q, const Distinguisher& f);

struct OiReport {
  std::string name;
  double error = 0.0;
  double bound = 0.0;
  bool pass = false;
};

OiReport make_report(std::string name, double error, double bound, double slack = 1e-9);

// |sum (y - p) k(z_t, z*)| <= sqrt(k(z*, z*)) sqrt(1 + sum_t E p (1 - p) k(z_t, z_t)).
double representer_bound(const std::vector<Round>& rounds, const Kernel& k, const Point& z_star);
// sqrt(k(z*, z*)) sqrt(rho + sum_t E q (1 - q) k(z_t, z_t)).
double quantile_representer_bound(const std::vector<Round>& rounds, const Kernel& k, const Point& z_star, double q,
                                  double rho);
inline double calibration_bound(std::int64_t T) { return std::sqrt(1.0 + static_cast<double>(T) / 4.0); }

// sqrt(sum_t sum_s w_t w_s k(z_t, z_s)) with w_t = y_t - p_t at the sampled p_t.
double kernel_calibration_error(const std::vector<Round>& rounds, const Kernel& k);

// Laplace kernel on p times the group-pair count on (i, j).
Kernel multicalibration_kernel(const GroupFamily& groups);

struct MulticalibrationBound {
  double kce = 0.0;
  double reference = 0.0;  // sqrt(m T + 1)
};

// Kernel calibration error under the multicalibration kernel. Rounds carry graph elements.
MulticalibrationBound distance_to_multicalibration_bound(const std::vector<Round>& rounds, const GroupFamily& groups,
                                                         int n_bins);

struct McCell {
  std::size_t g = 0;   // group of i
  std::size_t g2 = 0;  // group of j
  int bin = 0;
  double error = 0.0;  // sum_t E (y - p) 1{cell}
  double mass = 0.0;   // sum_t P(cell)
  std::int64_t count = 0;  // rounds whose support touches the cell
};

// Every (g, g', bin) cell, in lexicographic order.
std::vector<McCell> multicalibration_table(const std::vector<Round>& rounds, const GroupFamily& groups, int n_bins);
double max_abs_cell_error(const std::vector<McCell>& table);

// Vector probes f = K(., z*) w.
double vector_probe_error(const std::vector<VectorRound>& rounds, const MatrixKernel& k, const VectorPoint& z_star,
                          const Eigen::VectorXd& w);
// |f| sqrt(sum_t r_t^T K(z_t, z_t) r_t + 2 sum_t max(residual_t, 0)).
double vector_probe_bound(const std::vector<VectorRound>& rounds, const MatrixKernel& k, const VectorPoint& z_star,
                          const Eigen::VectorXd& w);

std::vector<Round> simulate(BinarySimulator& nature, BinaryPredictor& predictor, std::int64_t T);
std::vector<Round> simulate(RealSimulator& nature, QuantilePredictor& predictor, std::int64_t T);
std::vector<VectorRound> simulate(VectorSimulator& nature, VectorPredictor& predictor, std::int64_t T);

// CSV writers, first column schema_version.
void write_oi_csv(std::ostream& out, const std::vector<OiReport>& reports);
void write_mc_table_csv(std::ostream& out, const std::vector<McCell>& table, const GroupFamily& groups);

}  // namespace anykernel
