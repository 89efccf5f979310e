#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "rsa/ingest.hpp"

namespace rsa {

enum class Measure { correlation, euclidean, mahalanobis };
std::string_view to_string(Measure measure);
Measure parse_measure(std::string_view text);

// Centered-norm floor below which a pattern counts as constant.
inline constexpr double kConstantNormThreshold = 1e-12;
// Correlation distance assigned when either pattern is constant.
inline constexpr double kConstantFallbackDistance = 1.0;
inline constexpr double kDefaultRidge = 1e-3;

struct Dissimilarity {
  double value = 0.0;
  bool constant_input = false;  // correlation fallback was used
};

// 1 - Pearson(a, b) over mean-centered patterns, in [0, 2].
Dissimilarity correlation_distance_flagged(std::span<const double> a, std::span<const double> b);
double correlation_distance(std::span<const double> a, std::span<const double> b);

double euclidean_distance(std::span<const double> a, std::span<const double> b);

// Symmetric covariance plus its Cholesky factor. The factor is computed on
// construction; a matrix that is not numerically positive definite is kept
// but every Mahalanobis evaluation against it fails with "singular covariance".
class CovarianceEstimate {
 public:
  CovarianceEstimate(Eigen::MatrixXd matrix, double ridge);

  static CovarianceEstimate identity(std::size_t dims);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  double ridge() const { return ridge_; }
  std::size_t dims() const { return static_cast<std::size_t>(matrix_.rows()); }
  bool positive_definite() const { return factor_.has_value(); }
  const Eigen::LLT<Eigen::MatrixXd>& factor() const;

 private:
  Eigen::MatrixXd matrix_;
  double ridge_;
  std::optional<Eigen::LLT<Eigen::MatrixXd>> factor_;
};

// Sample covariance of the rows (denominator N-1) plus ridge * trace / H on
// the diagonal. When the trace is zero the ridge itself is added.
CovarianceEstimate estimate_covariance(const ActivityMatrix& matrix, double ridge = kDefaultRidge);

double mahalanobis_distance(std::span<const double> a, std::span<const double> b,
                            const CovarianceEstimate& cov);

// N x N dissimilarity matrix: exact zero diagonal, symmetric, finite, >= 0.
class Rdm {
 public:
  Rdm(ConditionSet conditions, std::optional<Measure> measure, std::string label,
      std::vector<double> data);

  const ConditionSet& conditions() const { return conditions_; }
  const std::optional<Measure>& measure() const { return measure_; }
  const std::string& label() const { return label_; }
  std::size_t size() const { return conditions_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * size() + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * size(), size());
  }
  std::span<const double> data() const { return data_; }

  // Conditions whose pattern was constant (correlation fallback rows).
  const std::vector<std::size_t>& constant_conditions() const { return constant_conditions_; }
  void set_constant_conditions(std::vector<std::size_t> indices) {
    constant_conditions_ = std::move(indices);
  }

  // Strict upper triangle, row by row.
  std::vector<double> upper_triangle() const;

 private:
  ConditionSet conditions_;
  std::optional<Measure> measure_;
  std::string label_;
  std::vector<double> data_;
  std::vector<std::size_t> constant_conditions_;
};

Rdm build_rdm(const ActivityMatrix& matrix, Measure measure,
              const std::optional<CovarianceEstimate>& cov = std::nullopt);

// CSV: corner cell "<label>@<measure>", then condition ids along the first
// row and column; cells printed with 17 significant digits.
void write_rdm(const std::filesystem::path& path, const Rdm& rdm);
Rdm read_rdm(const std::filesystem::path& path);

}  // namespace rsa
