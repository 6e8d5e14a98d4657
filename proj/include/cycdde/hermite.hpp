#pragma once

#include <span>

namespace cycdde {

/// Cubic Hermite interpolation on [t0, t0 + h]; s = (t - t0) / h in [0, 1].
inline double hermite(double y0, double d0, double y1, double d1, double h, double s) {
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
}

inline double hermite_derivative(double y0, double d0, double y1, double d1, double h, double s) {
    const double s2 = s * s;
    const double g00 = 6 * s2 - 6 * s;
    const double g10 = 3 * s2 - 4 * s + 1;
    const double g01 = -6 * s2 + 6 * s;
    const double g11 = 3 * s2 - 2 * s;
    return (g00 * y0 + g01 * y1) / h + g10 * d0 + g11 * d1;
}

}  // namespace cycdde
