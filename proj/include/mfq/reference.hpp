#pragma once

#include "mfq/core.hpp"
#include "mfq/geometry.hpp"

#include <functional>
#include <stdexcept>
#include <string>

namespace mfq {

// Raised when an adaptive integration cannot meet its tolerance within the
// subdivision budget; carries the best estimate reached.
class AccuracyError : public std::runtime_error {
  public:
    AccuracyError(const std::string& message, double estimate)
        : std::runtime_error(message), estimate_(estimate) {}
    double estimate() const { return estimate_; }

  private:
    double estimate_;
};

enum class IntegralTarget { Interior, Boundary };

// High-accuracy reference integrals over the parametric boundary patches.
// Boundary: direct adaptive Gauss-Kronrod integration of f against the area
// element (iterated per axis in 3D) to 1e-13. Interior: the divergence
// theorem applied to F(x) = (int_{x1_0}^{x1} f dt, 0[, 0]) with the inner
// line integral at 1e-14, so only boundary integrals are ever computed.
// Throws std::runtime_error when the domain has no patches and AccuracyError
// when tolerances cannot be met.
template <int D>
double reference_integral(const Domain<D>& dom,
                          const std::function<double(const Pt<D>&)>& f, IntegralTarget target);

}  // namespace mfq
