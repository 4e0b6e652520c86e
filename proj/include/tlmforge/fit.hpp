#pragma once

// Straight-line least squares with a covariance-aware evaluation point.
// The extraction needs the fitted line's value at a reference abscissa that
// is generally not zero, so the standard error of that value must include
// the slope/intercept covariance; reporting the raw intercept error instead
// would overstate it.

#include <cmath>
#include <optional>
#include <vector>

#include "tlmforge/core.hpp"

namespace tlmforge {

struct FitPoint {
    double x = 0.0;
    double y = 0.0;
    std::optional<double> sigma;  // per-point standard deviation, if known
};

struct FitResult {
    double slope = 0.0;
    double slope_stderr = 0.0;
    double value_at_reference = 0.0;  // fitted line evaluated at `reference`
    double value_stderr = 0.0;
    double reference = 0.0;
    double intercept = 0.0;           // value at x = 0, for convenience
    double r_squared = 1.0;
    bool weighted = false;
    int n_points = 0;
};

/// Ordinary least squares, or weighted when every point carries a sigma.
/// Conventions: with known sigmas the parameter covariance is taken from
/// the weights alone; without them it is scaled by the residual variance
/// (zero for n = 2, an exact interpolation). Zero total variance in y
/// defines r^2 = 1.
inline FitResult fit_line(const std::vector<FitPoint>& pts, double reference = 0.0) {
    const int n = static_cast<int>(pts.size());
    if (n < 2) throw fit_error("fit_line: need at least 2 points");

    bool weighted = true;
    for (const auto& p : pts)
        if (!p.sigma || !(*p.sigma > 0.0)) { weighted = false; break; }

    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (const auto& p : pts) {
        const double w = weighted ? 1.0 / (*p.sigma * *p.sigma) : 1.0;
        sw += w;
        sx += w * p.x;
        sy += w * p.y;
    }
    const double xbar = sx / sw, ybar = sy / sw;

    // centered sums for numerical robustness
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : pts) {
        const double w = weighted ? 1.0 / (*p.sigma * *p.sigma) : 1.0;
        sxx += w * (p.x - xbar) * (p.x - xbar);
        sxy += w * (p.x - xbar) * (p.y - ybar);
    }
    if (!(sxx > 0.0))
        throw fit_error("fit_line: degenerate abscissae (all x equal)");

    FitResult r;
    r.n_points = n;
    r.weighted = weighted;
    r.reference = reference;
    r.slope = sxy / sxx;
    r.intercept = ybar - r.slope * xbar;
    r.value_at_reference = ybar + r.slope * (reference - xbar);

    double ss_res = 0.0, ss_tot = 0.0;
    for (const auto& p : pts) {
        const double w = weighted ? 1.0 / (*p.sigma * *p.sigma) : 1.0;
        const double e = p.y - (r.intercept + r.slope * p.x);
        ss_res += w * e * e;
        ss_tot += w * (p.y - ybar) * (p.y - ybar);
    }
    r.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    if (r.r_squared < 0.0) r.r_squared = 0.0;

    // Parameter covariance in the centered frame: Var(slope) = 1/sxx,
    // Var(value at x0) = 1/sw + (x0 - xbar)^2/sxx, both times s^2 when the
    // residual variance has to be estimated from the data.
    double s2 = 1.0;
    if (!weighted) s2 = n > 2 ? ss_res / (n - 2) : 0.0;
    r.slope_stderr = std::sqrt(s2 / sxx);
    const double d = reference - xbar;
    r.value_stderr = std::sqrt(s2 * (1.0 / sw + d * d / sxx));
    return r;
}

} // namespace tlmforge
