#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fptlab {

/// Time value with +inf as a distinguished "never" sentinel ordered above
/// every finite time.
inline constexpr double kNever = std::numeric_limits<double>::infinity();

inline bool is_never(double t) { return std::isinf(t) && t > 0; }

/// First-passage modes. C0/C+ form the left-contact event, J0/J+ the
/// gap-from-the-left event.
enum class Mode { C0, CPlus, J0, JPlus, NoCrossing };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::C0: return "C0";
    case Mode::CPlus: return "C+";
    case Mode::J0: return "J0";
    case Mode::JPlus: return "J+";
    case Mode::NoCrossing: return "NoCrossing";
  }
  return "?";
}

inline bool is_left_contact(Mode m) { return m == Mode::C0 || m == Mode::CPlus; }
inline bool is_gap(Mode m) { return m == Mode::J0 || m == Mode::JPlus; }

enum class ErrorKind {
  Structural,   // malformed path/barrier/spec
  Domain,       // argument outside the supported domain
  Inconsistent, // crossing record violates Y_{tau-} <= 0 <= Y_tau
  Unsupported,  // parameter regime without closed forms (beta >= 0)
  Accuracy,     // quadrature did not reach the requested tolerance
  Resonance,    // D_{nu+1}(z(a)) numerically zero
  Convergence,  // fixed-point iteration did not converge
  UnderSample,  // not enough samples for a statistical test
  Parse,        // config / path-file syntax
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Structural: return "structural";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Inconsistent: return "inconsistent";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Accuracy: return "accuracy";
    case ErrorKind::Resonance: return "resonance";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::UnderSample: return "under-sample";
    case ErrorKind::Parse: return "parse";
  }
  return "?";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Error that carries a numeric diagnostic (achieved error estimate,
/// last sup-norm change, ...).
class NumericalError : public Error {
 public:
  NumericalError(ErrorKind kind, const std::string& what, double diagnostic)
      : Error(kind, what), diagnostic_(diagnostic) {}
  double diagnostic() const noexcept { return diagnostic_; }

 private:
  double diagnostic_;
};

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
  if (!cond) throw Error(kind, msg);
}

}  // namespace fptlab
