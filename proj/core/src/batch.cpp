#include "anykernel/batch.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "anykernel/binary.hpp"
#include "anykernel/errors.hpp"
#include "anykernel/gram.hpp"

namespace anykernel {

void LabeledSample::validate() const {
  if (y.empty()) throw DomainError("sample is empty");
  if (x.size() != y.size()) throw DomainError("sample has mismatched points and labels");
  for (double v : y)
    if (!(v >= -1.0 && v <= 1.0)) throw DomainError("labels must lie in [-1, 1]");
}

BallSolution rkhs_ball_learner(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, double radius) {
  const auto n = y.size();
  if (n == 0 || gram.rows() != n || gram.cols() != n) throw DomainError("gram and labels disagree in size");
  if (!(radius > 0.0)) throw DomainError("radius must be positive");
  if (!passes_psd_test(gram)) throw PsdError("gram matrix is not PSD within tolerance");
  BallSolution s;
  const double q = y.dot(gram * y);
  if (q <= 1e-12 * (1.0 + gram.trace())) {
    s.alpha = Eigen::VectorXd::Zero(n);
    s.value = 0.0;
    return s;
  }
  s.alpha = (radius / std::sqrt(q)) * y;
  s.value = radius * std::sqrt(q) / static_cast<double>(n);
  return s;
}

BallSolution rkhs_ball_learner(const LabeledSample& sample, const Kernel& k, double radius) {
  sample.validate();
  const auto g = gram_matrix(k, sample.x);
  return rkhs_ball_learner(g.entries, Eigen::Map<const Eigen::VectorXd>(sample.y.data(), static_cast<Eigen::Index>(sample.size())), radius);
}

PredictionDistribution online_to_batch_at(const std::vector<Round>& rounds, const Kernel& k, const Features& x,
                                          std::size_t i) {
  if (rounds.empty()) throw DomainError("online-to-batch needs a nonempty transcript");
  if (i < 1 || i > rounds.size()) throw DomainError("round index out of range");
  BinaryPredictor pred(k);
  for (std::size_t s = 0; s + 1 < i; ++s) pred.observe(rounds[s]);
  return pred.predict(x).dist;
}

PredictionDistribution online_to_batch(const std::vector<Round>& rounds, const Kernel& k, const Features& x,
                                       RngStream& rng) {
  if (rounds.empty()) throw DomainError("online-to-batch needs a nonempty transcript");
  return online_to_batch_at(rounds, k, x, static_cast<std::size_t>(rng.index(rounds.size())) + 1);
}

double online_to_batch_mean(const std::vector<Round>& rounds, const Kernel& k, const Features& x) {
  if (rounds.empty()) throw DomainError("online-to-batch needs a nonempty transcript");
  BinaryPredictor pred(k);
  double s = 0.0;
  for (const auto& r : rounds) {
    s += pred.predict(x).dist.mean();
    pred.observe(r);
  }
  return s / static_cast<double>(rounds.size());
}

LabeledSample read_sample_csv(std::istream& in) {
  std::string line;
  std::int64_t n = 1;
  if (!std::getline(in, line) || line.rfind("y", 0) != 0) throw FormatError(1, "expected header starting with y");
  std::size_t cols = 0;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) ++cols;
  }
  LabeledSample s;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw FormatError(n, "bad number '" + tok + "'");
      }
    }
    if (vals.size() != cols) throw FormatError(n, "expected " + std::to_string(cols) + " fields");
    s.y.push_back(vals[0]);
    s.x.push_back(Point{DenseVector(vals.begin() + 1, vals.end()), 0.0});
  }
  s.validate();
  return s;
}

void write_alpha_csv(std::ostream& out, const BallSolution& s) {
  out << "schema_version,index,alpha\n";
  for (Eigen::Index i = 0; i < s.alpha.size(); ++i) out << 1 << ',' << i << ',' << format_number(s.alpha[i]) << '\n';
}

}  // namespace anykernel
