#include "rsa/rdm.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rsa/error.hpp"
#include "rsa/io.hpp"
#include "rsa/numeric.hpp"
#include "rsa/parallel.hpp"

namespace rsa {

std::string_view to_string(Measure measure) {
  switch (measure) {
    case Measure::correlation: return "correlation";
    case Measure::euclidean: return "euclidean";
    case Measure::mahalanobis: return "mahalanobis";
  }
  return "unknown";
}

Measure parse_measure(std::string_view text) {
  if (text == "correlation") return Measure::correlation;
  if (text == "euclidean") return Measure::euclidean;
  if (text == "mahalanobis") return Measure::mahalanobis;
  throw ValidationError(fmt::format("unknown measure '{}'", text));
}

namespace {

struct CenteredPattern {
  std::vector<double> values;
  double sum_squares = 0.0;
  bool constant = false;
};

CenteredPattern center(std::span<const double> a) {
  CenteredPattern p;
  const double mean = numeric::pairwise_sum(a) / static_cast<double>(a.size());
  p.values.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p.values[i] = a[i] - mean;
  p.sum_squares = numeric::dot(p.values, p.values);
  p.constant = std::sqrt(p.sum_squares) < kConstantNormThreshold;
  return p;
}

Dissimilarity correlation_between(const CenteredPattern& a, const CenteredPattern& b) {
  if (a.constant || b.constant) return {kConstantFallbackDistance, true};
  double r = numeric::dot(a.values, b.values) / std::sqrt(a.sum_squares * b.sum_squares);
  r = std::clamp(r, -1.0, 1.0);
  return {1.0 - r, false};
}

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError(fmt::format("length mismatch ({} vs {})", a.size(), b.size()));
  }
}

}  // namespace

Dissimilarity correlation_distance_flagged(std::span<const double> a, std::span<const double> b) {
  check_lengths(a, b);
  if (a.size() < 2) throw ValidationError("correlation distance needs at least 2 dimensions");
  return correlation_between(center(a), center(b));
}

double correlation_distance(std::span<const double> a, std::span<const double> b) {
  return correlation_distance_flagged(a, b).value;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  check_lengths(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

// ---- covariance ---------------------------------------------------------------

CovarianceEstimate::CovarianceEstimate(Eigen::MatrixXd matrix, double ridge)
    : matrix_(std::move(matrix)), ridge_(ridge) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw ValidationError("covariance must be a non-empty square matrix");
  }
  if (!matrix_.allFinite()) throw ValidationError("covariance has non-finite entries");
  if (!matrix_.isApprox(matrix_.transpose(), 1e-12)) {
    throw ValidationError("covariance is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(matrix_);
  if (llt.info() != Eigen::Success) return;
  // Rank-deficient input can survive the factorization with round-off sized
  // pivots; treat those as singular too.
  const Eigen::VectorXd pivots = llt.matrixL().toDenseMatrix().diagonal();
  const double largest = pivots.maxCoeff();
  const double smallest = pivots.minCoeff();
  if (!(smallest > 0.0) || smallest * smallest < 1e-12 * largest * largest) return;
  factor_ = std::move(llt);
}

CovarianceEstimate CovarianceEstimate::identity(std::size_t dims) {
  const auto n = static_cast<Eigen::Index>(dims);
  return CovarianceEstimate(Eigen::MatrixXd::Identity(n, n), 0.0);
}

const Eigen::LLT<Eigen::MatrixXd>& CovarianceEstimate::factor() const {
  if (!factor_) throw ValidationError("singular covariance");
  return *factor_;
}

CovarianceEstimate estimate_covariance(const ActivityMatrix& matrix, double ridge) {
  if (matrix.rows() < 2) throw ValidationError("covariance needs at least 2 conditions");
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw ValidationError("ridge must be >= 0");
  const auto n = static_cast<Eigen::Index>(matrix.rows());
  const auto h = static_cast<Eigen::Index>(matrix.cols());
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
      matrix.data().data(), n, h);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  cov = (cov + cov.transpose()) / 2.0;
  const double trace = cov.trace();
  const double scale = trace > 0.0 ? trace / static_cast<double>(h) : 1.0;
  cov.diagonal().array() += ridge * scale;
  return CovarianceEstimate(std::move(cov), ridge);
}

double mahalanobis_distance(std::span<const double> a, std::span<const double> b,
                            const CovarianceEstimate& cov) {
  check_lengths(a, b);
  if (a.size() != cov.dims()) throw ValidationError("covariance dimension mismatch");
  const auto& llt = cov.factor();
  Eigen::VectorXd diff(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) diff[static_cast<Eigen::Index>(i)] = a[i] - b[i];
  // Sigma = L L^T, so d^T Sigma^-1 d = |L^-1 d|^2.
  llt.matrixL().solveInPlace(diff);
  return std::sqrt(diff.squaredNorm());
}

// ---- Rdm -------------------------------------------------------------------------

Rdm::Rdm(ConditionSet conditions, std::optional<Measure> measure, std::string label,
         std::vector<double> data)
    : conditions_(std::move(conditions)), measure_(measure), label_(std::move(label)),
      data_(std::move(data)) {
  const std::size_t n = conditions_.size();
  if (data_.size() != n * n) throw ValidationError("RDM shape does not match condition set");
  for (std::size_t i = 0; i < n; ++i) {
    if ((*this)(i, i) != 0.0) throw ValidationError("RDM diagonal must be zero");
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = (*this)(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError("RDM entries must be finite and non-negative");
      }
      if (v != (*this)(j, i)) throw ValidationError("RDM is not symmetric");
      if (measure_ == Measure::correlation && v > 2.0) {
        throw ValidationError("correlation RDM entry outside [0, 2]");
      }
    }
  }
}

std::vector<double> Rdm::upper_triangle() const {
  const std::size_t n = size();
  std::vector<double> out;
  out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out.push_back((*this)(i, j));
  }
  return out;
}

Rdm build_rdm(const ActivityMatrix& matrix, Measure measure,
              const std::optional<CovarianceEstimate>& cov) {
  const std::size_t n = matrix.rows();
  if (measure == Measure::mahalanobis) {
    if (!cov) throw ValidationError("mahalanobis measure requires a covariance estimate");
    if (cov->dims() != matrix.cols()) throw ValidationError("covariance dimension mismatch");
    cov->factor();  // fail fast on a singular estimate
  }
  if (measure == Measure::correlation && matrix.cols() < 2) {
    throw ValidationError("correlation distance needs at least 2 dimensions");
  }

  std::vector<CenteredPattern> patterns;
  if (measure == Measure::correlation) {
    patterns.resize(n);
    parallel::for_each_index(n, [&](std::size_t i) { patterns[i] = center(matrix.row(i)); });
  }

  std::vector<double> data(n * n, 0.0);
  parallel::for_each_index(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = 0.0;
      switch (measure) {
        case Measure::correlation: d = correlation_between(patterns[i], patterns[j]).value; break;
        case Measure::euclidean: d = euclidean_distance(matrix.row(i), matrix.row(j)); break;
        case Measure::mahalanobis: d = mahalanobis_distance(matrix.row(i), matrix.row(j), *cov); break;
      }
      data[i * n + j] = d;
      data[j * n + i] = d;
    }
  });

  Rdm rdm(matrix.conditions(), measure, matrix.layer().to_string(), std::move(data));
  if (measure == Measure::correlation) {
    std::vector<std::size_t> constant;
    for (std::size_t i = 0; i < n; ++i) {
      if (patterns[i].constant) constant.push_back(i);
    }
    rdm.set_constant_conditions(std::move(constant));
  }
  return rdm;
}

// ---- file format -----------------------------------------------------------------

void write_rdm(const std::filesystem::path& path, const Rdm& rdm) {
  std::string corner = rdm.label();
  if (rdm.measure()) corner += fmt::format("@{}", to_string(*rdm.measure()));
  std::string out = io::quote_field(corner);
  for (const auto& id : rdm.conditions().ids()) {
    out += ',';
    out += io::quote_field(id);
  }
  out += '\n';
  for (std::size_t i = 0; i < rdm.size(); ++i) {
    out += io::quote_field(rdm.conditions().id(i));
    for (double v : rdm.row(i)) {
      out += ',';
      out += io::format_number(v);
    }
    out += '\n';
  }
  io::write_text(path, out);
}

Rdm read_rdm(const std::filesystem::path& path) {
  const auto lines = io::read_lines(path);
  if (lines.empty()) throw ValidationError(fmt::format("{}: empty RDM file", path.string()));
  auto header = io::split_fields(lines.front());
  std::string label = header.front();
  std::optional<Measure> measure;
  if (const auto at = label.rfind('@'); at != std::string::npos) {
    measure = parse_measure(label.substr(at + 1));
    label.resize(at);
  }
  std::vector<std::string> ids(header.begin() + 1, header.end());
  const std::size_t n = ids.size();
  std::vector<double> data;
  data.reserve(n * n);
  std::size_t row = 0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const auto fields = io::split_fields(lines[k]);
    if (fields.size() != n + 1 || row >= n || fields.front() != ids[row]) {
      throw ValidationError(fmt::format("{}:{}: malformed RDM row", path.string(), k + 1));
    }
    for (std::size_t j = 1; j < fields.size(); ++j) {
      data.push_back(io::parse_double(fields[j], "RDM cell"));
    }
    ++row;
  }
  if (row != n) throw ValidationError(fmt::format("{}: RDM is not square", path.string()));
  return Rdm(ConditionSet(std::move(ids)), measure, std::move(label), std::move(data));
}

}  // namespace rsa
