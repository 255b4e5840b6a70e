#pragma once

#include <cstdint>
#include <sstream>

#include "fptlab/core.hpp"

namespace fptlab {

/// dX = (alpha + beta X) dt + sigma dW + dJ, J compound Poisson with
/// intensity lambda and Exp(eta) jump sizes; barrier level a, start x < a.
struct ModelParams {
  double alpha = 0.1;
  double beta = -0.5;
  double sigma = 0.3;
  double lambda = 1.0;
  double eta = 2.0;
  double a = 1.0;
  double x = 0.0;

  void validate() const {
    auto bad = [](const char* m) { throw Error(ErrorKind::Domain, std::string("model: ") + m); };
    if (!(sigma > 0.0)) bad("sigma must be > 0");
    if (!(lambda > 0.0)) bad("lambda must be > 0");
    if (!(eta > 0.0)) bad("eta must be > 0");
    if (!(x < a)) bad("start x must be below the barrier a");
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(a)) bad("non-finite parameter");
  }

  ModelParams with_start(double start) const {
    ModelParams p = *this;
    p.x = start;
    return p;
  }
};

struct SimConfig {
  double horizon = 50.0;
  double step = 1e-3;
  std::uint64_t seed = 20260314;
  bool bridge_correction = true;
  std::uint64_t n_paths = 100000;

  void validate() const {
    auto bad = [](const char* m) { throw Error(ErrorKind::Domain, std::string("sim: ") + m); };
    if (!(horizon > 0.0) || !std::isfinite(horizon)) bad("horizon must be > 0");
    if (!(step > 0.0)) bad("step must be > 0");
    if (n_paths < 1) bad("n_paths must be >= 1");
  }
};

}  // namespace fptlab
