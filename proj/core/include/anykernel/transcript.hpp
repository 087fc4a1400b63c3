#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "anykernel/point.hpp"

namespace anykernel {

// One- or two-point distribution: q with probability tau, q2 otherwise.
struct PredictionDistribution {
  double q = 0.0;
  double q2 = 0.0;
  double tau = 1.0;

  static PredictionDistribution point_mass(double p) { return {p, p, 1.0}; }
  static PredictionDistribution two_point(double q, double q2, double tau) { return {q, q2, tau}; }

  bool is_point_mass() const { return q == q2; }
  double mean() const { return is_point_mass() ? q : tau * q + (1.0 - tau) * q2; }
  // Uses one uniform draw u in [0, 1).
  double sample(double u) const { return (is_point_mass() || u < tau) ? q : q2; }

  template <class F>
  double expect(F&& g) const {
    if (is_point_mass()) return g(q);
    return tau * g(q) + (1.0 - tau) * g(q2);
  }

  friend bool operator==(const PredictionDistribution&, const PredictionDistribution&) = default;
};

// Which step of the hedging procedure produced a round's distribution.
enum class Branch : std::uint8_t {
  kSign = 0,   // both endpoint values share a nonzero sign
  kZero = 1,   // an endpoint or midpoint value is exactly zero
  kRoot = 2,   // continuous search reached |S| within tolerance
  kHedge = 3,  // two-point randomization
};

struct Round {
  std::int64_t t = 0;
  Features x;
  PredictionDistribution dist;
  double p = 0.0;
  double y = 0.0;
  // Predictor diagnostics.
  double s_q = 0.0;
  double s_q2 = 0.0;
  double epsilon = 0.0;
  double b = 0.0;
  Branch branch = Branch::kSign;
};

struct TranscriptHeader {
  std::string mode = "binary";
  std::string kernel;
  // Hash found in a file that was read; writers always recompute it from kernel.
  std::string stored_hash;
  std::uint64_t seed = 0;
  // Quantile runs: target level and outcome range. Binary runs use [0, 1].
  double quantile = 0.5;
  double y_min = 0.0;
  double y_max = 1.0;
  // Opaque JSON text echoed from the run configuration.
  std::string context = "{}";
};

struct Transcript {
  TranscriptHeader header;
  std::vector<Round> rounds;
};

struct VectorRound {
  std::int64_t t = 0;
  Features x;
  std::vector<double> p;
  std::vector<double> y;
  double residual = 0.0;
  bool approximate = false;
  int iterations = 0;
};

struct VectorTranscript {
  TranscriptHeader header;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<VectorRound> rounds;
};

// 16 hex digits of FNV-1a over the kernel description.
std::string kernel_hash(const std::string& kernel_description);

// Line-delimited JSON: a header record, then one record per round. Doubles round-trip exactly.
void write_transcript(std::ostream& out, const Transcript& tr);
Transcript read_transcript(std::istream& in);
void write_vector_transcript(std::ostream& out, const VectorTranscript& tr);
VectorTranscript read_vector_transcript(std::istream& in);

// Reads only the header record; returns its mode.
std::string peek_transcript_mode(std::istream& in);

}  // namespace anykernel
