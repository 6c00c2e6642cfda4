#pragma once

#include <span>

namespace mcascade {

/// Ordinary least squares y = intercept + slope x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;  // 0 with two points
    double r_squared = 1.0;     // 1 when y is constant
};

/// Needs at least two points with distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace mcascade
