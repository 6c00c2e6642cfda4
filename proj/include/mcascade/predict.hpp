#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcascade/errors.hpp"
#include "mcascade/weights.hpp"

namespace mcascade {

/// Scan-then-bisect settings for the smallest-root solvers.
struct RootOptions {
    double q_max = 4.0;
    double step = 1.0 / 512.0;
    double tolerance = 1e-12;
};

/// Smallest x in [lo, hi] where f(x) crosses `target`: scan on a grid of
/// the given step for the first sign change of f - target, then bisect.
/// Infinite values of f count as lying above the target. Throws
/// NoRootError when no sign change is found.
template <class F>
double smallest_root(F&& f, double target, double lo, double hi, const RootOptions& opt);

/// xi: smallest solution of b^-xi0 = E|W1|^xi v E|W2|^xi.
double solve_xi(const WeightModel& model, double xi0, const RootOptions& opt = {});

/// zeta: smallest solution of b^-xi0 = E(|W1|^(z-1)|W2|) v E(|W1||W2|^(z-1)),
/// scanned over [0, q_max + 1].
double solve_zeta(const WeightModel& model, double xi0, const RootOptions& opt = {});

/// xi_* = -log_b(E|W1| v E|W2|). Throws AssumptionError outside (1/2, 1].
double xi_star(const WeightModel& model);

enum class Branch { Xi, Zeta, Capped };
std::string to_string(Branch b);

struct ImageDimension {
    double value = 0.0;
    Branch branch = Branch::Xi;
    double xi = 0.0;
    double zeta = 0.0;  // NaN when the zeta equation has no root in range
};

/// dim_H F(K) for dim_H K = xi0: xi ^ zeta when the weights may differ,
/// xi ^ 1 when the model certifies W1 = W2.
ImageDimension predicted_image_dim(const WeightModel& model, double xi0, const RootOptions& opt = {});

/// Closed-form image dimension for the lognormal kinds (the two KPZ-type
/// quadratics); nothing for other kinds.
std::optional<double> closed_form_image_dim(const WeightModel& model, double xi0);

struct PredictionRow {
    double xi0 = 0.0;
    double xi = 0.0;
    double zeta = 0.0;
    double xi_star = 0.0;
    double predicted = 0.0;
    Branch branch = Branch::Xi;
    double closed_form = 0.0;  // NaN when the kind has no closed form
};

std::vector<PredictionRow> kpz_curve(const WeightModel& model, std::span<const double> xi0_grid,
                                     const RootOptions& opt = {});

/// n evenly spaced points from 0 to 1 inclusive.
std::vector<double> unit_grid(int n);

struct LegendrePoint {
    std::array<double, 2> q{};
    std::array<double, 2> alpha{};  // grad Phi(q)
    double dim_level_set = 0.0;     // xi0 + q.alpha - Phi(q)
    bool in_j = false;              // q.alpha - Phi(q) > -xi0
};

LegendrePoint legendre_point(const WeightModel& model, double q1, double q2, double xi0);

/// Image dimension of a Hoelder level set K(alpha) of dimension d.
double restricted_image_dim(double alpha1, double alpha2, double dim_level_set, bool identical_weights);

/// The four spectrum candidates (xi,0), (0,xi), (zeta-1,1), (1,zeta-1) at
/// xi0, each with its restricted image dimension. The choice between the
/// two candidates of a regime depends on realized dimensions and is left
/// to the caller.
struct SpectrumCandidate {
    LegendrePoint point;
    double image_dim = 0.0;
};
std::vector<SpectrumCandidate> spectrum_candidates(const WeightModel& model, double xi0,
                                                   const RootOptions& opt = {});

/// Level-set dimension 1 - alpha_k of F_k; fractional models only.
double predicted_levelset_dim(const WeightModel& model, int k);

// ---------------------------------------------------------------------------

template <class F>
double smallest_root(F&& f, double target, double lo, double hi, const RootOptions& opt) {
    const auto g = [&](double x) {
        const double v = f(x);
        return v == std::numeric_limits<double>::infinity() ? v : v - target;
    };
    double x_prev = lo;
    double g_prev = g(lo);
    if (g_prev == 0.0) {
        return lo;
    }
    const auto steps = static_cast<long>(std::ceil((hi - lo) / opt.step - 1e-9));
    for (long i = 1; i <= steps; ++i) {
        const double x = std::min(hi, lo + static_cast<double>(i) * opt.step);
        const double gx = g(x);
        if (gx == 0.0) {
            return x;
        }
        if ((gx > 0.0) != (g_prev > 0.0)) {
            double a = x_prev;
            double b = x;
            const bool a_positive = g_prev > 0.0;
            while (b - a > opt.tolerance) {
                const double mid = 0.5 * (a + b);
                const double gm = g(mid);
                if (gm == 0.0) {
                    return mid;
                }
                if ((gm > 0.0) == a_positive) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return 0.5 * (a + b);
        }
        x_prev = x;
        g_prev = gx;
    }
    throw NoRootError("no root in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace mcascade
