#pragma once

#include "mfq/core.hpp"

#include <cmath>

namespace mfq {

// Generalized Runge bump centered at xr; value in (0, 1].
template <int D>
inline double runge(const Pt<D>& p, const Pt<D>& xr) {
    return 1.0 / (1.0 + 25.0 * (p - xr).squaredNorm());
}

// Franke's four-exponential test function composed with the affine map that
// sends [-1, 1]^2 onto its usual [0, 1]^2 domain.
inline double franke2d(const Pt<2>& p) {
    const double x = 0.5 * (p[0] + 1.0), y = 0.5 * (p[1] + 1.0);
    const double a = 9.0 * x, bb = 9.0 * y;
    return 0.75 * std::exp(-((a - 2.0) * (a - 2.0) + (bb - 2.0) * (bb - 2.0)) / 4.0) +
           0.75 * std::exp(-(a + 1.0) * (a + 1.0) / 49.0 - (bb + 1.0) / 10.0) +
           0.5 * std::exp(-((a - 7.0) * (a - 7.0) + (bb - 3.0) * (bb - 3.0)) / 4.0) -
           0.2 * std::exp(-(a - 4.0) * (a - 4.0) - (bb - 7.0) * (bb - 7.0));
}

// Renka's 3D extension of the Franke function, same affine composition.
inline double renka3d(const Pt<3>& p) {
    const double x = 0.5 * (p[0] + 1.0), y = 0.5 * (p[1] + 1.0), z = 0.5 * (p[2] + 1.0);
    const double a = 9.0 * x, bb = 9.0 * y, c = 9.0 * z;
    return 0.75 * std::exp(-((a - 2.0) * (a - 2.0) + (bb - 2.0) * (bb - 2.0) +
                             (c - 2.0) * (c - 2.0)) /
                           4.0) +
           0.75 * std::exp(-(a + 1.0) * (a + 1.0) / 49.0 - (bb + 1.0) / 10.0 - (c + 1.0) / 10.0) +
           0.5 * std::exp(-((a - 7.0) * (a - 7.0) + (bb - 3.0) * (bb - 3.0) +
                            (c - 5.0) * (c - 5.0)) /
                          4.0) -
           0.2 * std::exp(-(a - 4.0) * (a - 4.0) - (bb - 7.0) * (bb - 7.0) -
                          (c - 5.0) * (c - 5.0));
}

// The smooth second test function: Franke in 2D, Renka in 3D.
template <int D>
inline double smooth_test(const Pt<D>& p) {
    if constexpr (D == 2)
        return franke2d(p);
    else
        return renka3d(p);
}

}  // namespace mfq
