#include "params.hpp"

#include <cmath>
#include <sstream>

#include "error.hpp"

namespace selfsim {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::Domain: return "Domain";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::NoZeroWithinHorizon: return "NoZeroWithinHorizon";
    case ErrorCode::RootBracketFailure: return "RootBracketFailure";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::BisectionStall: return "BisectionStall";
    case ErrorCode::NoPlateau: return "NoPlateau";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::NonMonotoneInitialData: return "NonMonotoneInitialData";
    case ErrorCode::TimestepUnderflow: return "TimestepUnderflow";
    case ErrorCode::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorCode::InsufficientDecay: return "InsufficientDecay";
    case ErrorCode::BadExtinctionTime: return "BadExtinctionTime";
    case ErrorCode::Io: return "Io";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

Params make_params(int N, double p) {
  if (N < 1) {
    throw Error(ErrorCode::OutOfRange,
                "OutOfRange(N): dimension must satisfy N >= 1, got " + std::to_string(N));
  }
  if (!std::isfinite(p)) {
    throw Error(ErrorCode::OutOfRange, "OutOfRange(p): p must be finite");
  }
  const double p_c = 2.0 * N / (N + 1.0);
  if (p <= p_c) {
    std::ostringstream os;
    os.precision(17);
    os << "OutOfRange(p): requires p > p_c = 2N/(N+1) = " << p_c << ", got p = " << p;
    throw Error(ErrorCode::OutOfRange, os.str());
  }
  if (p >= 2.0) {
    std::ostringstream os;
    os.precision(17);
    os << "OutOfRange(p): requires p < 2, got p = " << p;
    throw Error(ErrorCode::OutOfRange, os.str());
  }

  Params out;
  out.N = N;
  out.p = p;
  out.p_c = p_c;
  out.e_flux = (2.0 - p) / (p - 1.0);
  out.e_g = 1.0 / (p - 1.0);
  out.e_slow = (p - 1.0) / (2.0 - p);
  out.e_time = 1.0 / (2.0 - p);
  out.e_weight = 2.0 * p / (3.0 * p - 2.0);
  out.e_energy = p / (p - 1.0);
  return out;
}

double log_rho(const Params& params, double r) {
  if (!(r > 0.0)) {
    throw Error(ErrorCode::Domain, "weight rho requires r > 0");
  }
  return (params.N - 1) * std::log(r) + r;
}

double weight_rho(const Params& params, double r) {
  if (!(r > 0.0)) {
    throw Error(ErrorCode::Domain, "weight rho requires r > 0");
  }
  if (params.N == 1) return std::exp(r);
  return std::pow(r, params.N - 1) * std::exp(r);
}

}  // namespace selfsim
