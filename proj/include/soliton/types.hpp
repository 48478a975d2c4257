#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace soliton {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Coordinates of a point in the pseudo-Euclidean space.
using Point = Eigen::VectorXd;

enum class ErrorCode {
  InvalidArgument,
  DegenerateConformalFactor,
  DegenerateAnsatz,
  DivisionByZero,
  SingularLocus,
  NullTranslationDirection,
  NonPositiveH,
  RequiresNonzeroTau,
  InvalidGalleryParams,
  OutOfDomain,
  StepSizeUnderflow,
  EventAtStart,
  SamplingExhausted,
  StencilOutOfDomain,
  ConfigInvalid,
  ProfileMalformed,
};

std::string_view error_name(ErrorCode code);

class SolitonError : public std::runtime_error {
 public:
  SolitonError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Diagonal metric data eps_i = +-1 of the flat background g.
/// At least two entries and at least one +1.
class Signature {
 public:
  explicit Signature(std::vector<int> eps);
  Signature(std::initializer_list<int> eps) : Signature(std::vector<int>(eps)) {}

  static Signature riemannian(std::size_t n);

  std::size_t dim() const noexcept { return eps_.size(); }
  double operator[](std::size_t i) const noexcept { return static_cast<double>(eps_[i]); }
  const std::vector<int>& entries() const noexcept { return eps_; }

  /// Sum_k eps_k a_k b_k.
  double dot(const Vector& a, const Vector& b) const;

  bool operator==(const Signature&) const = default;

 private:
  std::vector<int> eps_;
};

/// Value, coordinate gradient and coordinate Hessian of a scalar field at a point.
struct ScalarJet2 {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;

  ScalarJet2() = default;
  ScalarJet2(double v, Vector g, Matrix h);

  static ScalarJet2 constant(std::size_t n, double v);
  std::size_t dim() const noexcept { return static_cast<std::size_t>(gradient.size()); }

  ScalarJet2 operator-() const;
  /// Adds a constant to the value only.
  ScalarJet2 shifted(double c) const;
};

/// Dense symmetric n x n tensor. Writes go through set(), which mirrors the entry.
class SymTensor2 {
 public:
  explicit SymTensor2(std::size_t n) : m_(Matrix::Zero(n, n)) {}
  /// Symmetrizes its argument as (m + m^T)/2.
  static SymTensor2 from_matrix(const Matrix& m);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  void set(std::size_t i, std::size_t j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  const Matrix& matrix() const noexcept { return m_; }

  double max_abs() const { return m_.cwiseAbs().maxCoeff(); }

  SymTensor2& operator+=(const SymTensor2& o) {
    m_ += o.m_;
    return *this;
  }
  SymTensor2& operator-=(const SymTensor2& o) {
    m_ -= o.m_;
    return *this;
  }
  SymTensor2& operator*=(double s) {
    m_ *= s;
    return *this;
  }
  friend SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
  friend SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }
  friend SymTensor2 operator*(double s, SymTensor2 a) { return a *= s; }

 private:
  Matrix m_;
};

}  // namespace soliton
