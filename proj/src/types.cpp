#include "soliton/types.hpp"

namespace soliton {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateConformalFactor: return "DegenerateConformalFactor";
    case ErrorCode::DegenerateAnsatz: return "DegenerateAnsatz";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::SingularLocus: return "SingularLocus";
    case ErrorCode::NullTranslationDirection: return "NullTranslationDirection";
    case ErrorCode::NonPositiveH: return "NonPositiveH";
    case ErrorCode::RequiresNonzeroTau: return "RequiresNonzeroTau";
    case ErrorCode::InvalidGalleryParams: return "InvalidGalleryParams";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::EventAtStart: return "EventAtStart";
    case ErrorCode::SamplingExhausted: return "SamplingExhausted";
    case ErrorCode::StencilOutOfDomain: return "StencilOutOfDomain";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ProfileMalformed: return "ProfileMalformed";
  }
  return "Unknown";
}

Signature::Signature(std::vector<int> eps) : eps_(std::move(eps)) {
  if (eps_.size() < 2) {
    throw SolitonError(ErrorCode::InvalidArgument, "signature needs n >= 2 entries");
  }
  bool has_plus = false;
  for (int e : eps_) {
    if (e != 1 && e != -1) {
      throw SolitonError(ErrorCode::InvalidArgument, "signature entries must be +1 or -1");
    }
    has_plus = has_plus || e == 1;
  }
  if (!has_plus) {
    throw SolitonError(ErrorCode::InvalidArgument, "signature needs at least one +1 entry");
  }
}

Signature Signature::riemannian(std::size_t n) { return Signature(std::vector<int>(n, 1)); }

double Signature::dot(const Vector& a, const Vector& b) const {
  double s = 0.0;
  for (std::size_t k = 0; k < dim(); ++k) s += (*this)[k] * a[k] * b[k];
  return s;
}

ScalarJet2::ScalarJet2(double v, Vector g, Matrix h)
    : value(v), gradient(std::move(g)), hessian(std::move(h)) {
  if (hessian.rows() != gradient.size() || hessian.cols() != gradient.size()) {
    throw SolitonError(ErrorCode::InvalidArgument, "jet gradient/hessian size mismatch");
  }
  hessian = (0.5 * (hessian + hessian.transpose())).eval();
}

ScalarJet2 ScalarJet2::constant(std::size_t n, double v) {
  const auto m = static_cast<Eigen::Index>(n);
  return ScalarJet2(v, Vector::Zero(m), Matrix::Zero(m, m));
}

ScalarJet2 ScalarJet2::operator-() const {
  ScalarJet2 out = *this;
  out.value = -value;
  out.gradient = -gradient;
  out.hessian = -hessian;
  return out;
}

ScalarJet2 ScalarJet2::shifted(double c) const {
  ScalarJet2 out = *this;
  out.value += c;
  return out;
}

SymTensor2 SymTensor2::from_matrix(const Matrix& m) {
  SymTensor2 t(static_cast<std::size_t>(m.rows()));
  t.m_ = 0.5 * (m + m.transpose());
  return t;
}

}  // namespace soliton
