#include "mcascade/predict.hpp"

#include <algorithm>
#include <cmath>

namespace mcascade {

namespace {

void check_xi0(double xi0) {
    if (!(xi0 >= 0.0 && xi0 <= 1.0)) {
        throw DomainError("xi0 must lie in [0, 1]");
    }
}

// Smaller root of beta x^2 - slope x + c = 0, written to stay accurate as
// beta -> 0 (where it tends to c / slope).
double smaller_quadratic_root(double beta, double slope, double c) {
    const double disc = slope * slope - 4.0 * beta * c;
    if (disc < 0.0) {
        throw NoRootError("closed-form quadratic has no real root");
    }
    return 2.0 * c / (slope + std::sqrt(disc));
}

}  // namespace

double solve_xi(const WeightModel& model, double xi0, const RootOptions& opt) {
    check_xi0(xi0);
    if (xi0 == 0.0) {
        return 0.0;
    }
    const double target = std::pow(static_cast<double>(model.base()), -xi0);
    return smallest_root([&](double x) { return max_marginal_moment(model, x); }, target, 0.0, opt.q_max,
                         opt);
}

double solve_zeta(const WeightModel& model, double xi0, const RootOptions& opt) {
    check_xi0(xi0);
    const double target = std::pow(static_cast<double>(model.base()), -xi0);
    return smallest_root([&](double x) { return max_cross_moment(model, x); }, target, 0.0,
                         opt.q_max + 1.0, opt);
}

double xi_star(const WeightModel& model) {
    const double m = std::max(joint_moment(model, 1.0, 0.0), joint_moment(model, 0.0, 1.0));
    const double v = -std::log(m) / std::log(static_cast<double>(model.base()));
    if (!(v > 0.5 && v <= 1.0 + 1e-12)) {
        throw AssumptionError("xi_* = " + std::to_string(v) + " lies outside (1/2, 1]");
    }
    return std::min(v, 1.0);
}

std::string to_string(Branch b) {
    switch (b) {
        case Branch::Xi: return "xi";
        case Branch::Zeta: return "zeta";
        case Branch::Capped: return "capped";
    }
    return "?";
}

ImageDimension predicted_image_dim(const WeightModel& model, double xi0, const RootOptions& opt) {
    ImageDimension r;
    r.xi = solve_xi(model, xi0, opt);
    if (model.identical_weights()) {
        try {
            r.zeta = solve_zeta(model, xi0, opt);
        } catch (const NoRootError&) {
            r.zeta = std::numeric_limits<double>::quiet_NaN();
        }
        if (r.xi <= 1.0) {
            r.value = r.xi;
            r.branch = Branch::Xi;
        } else {
            r.value = 1.0;
            r.branch = Branch::Capped;
        }
        return r;
    }
    r.zeta = solve_zeta(model, xi0, opt);
    if (r.xi < r.zeta) {
        r.value = r.xi;
        r.branch = Branch::Xi;
    } else if (r.zeta < r.xi) {
        r.value = r.zeta;
        r.branch = Branch::Zeta;
    } else {
        r.value = r.xi;
        r.branch = xi0 <= xi_star(model) ? Branch::Xi : Branch::Zeta;
    }
    return r;
}

std::optional<double> closed_form_image_dim(const WeightModel& model, double xi0) {
    check_xi0(xi0);
    const double beta = model.beta();
    double value = 0.0;
    if (const auto* l = std::get_if<LognormalSigned>(&model.kind())) {
        // xi0 - alpha xi = beta xi (1 - xi)
        value = smaller_quadratic_root(beta, l->alpha + beta, xi0);
    } else if (const auto* m = std::get_if<Mixed>(&model.kind())) {
        if (xi0 <= m->alpha) {
            value = smaller_quadratic_root(beta, m->alpha + beta, xi0);
        } else {
            // xi0 - xi = beta xi (1 - xi) + alpha - 1
            value = smaller_quadratic_root(beta, 1.0 + beta, xi0 - m->alpha + 1.0);
        }
    } else {
        return std::nullopt;
    }
    return model.identical_weights() ? std::min(value, 1.0) : value;
}

std::vector<PredictionRow> kpz_curve(const WeightModel& model, std::span<const double> xi0_grid,
                                     const RootOptions& opt) {
    const double xs = xi_star(model);
    std::vector<PredictionRow> rows;
    rows.reserve(xi0_grid.size());
    for (double xi0 : xi0_grid) {
        const ImageDimension d = predicted_image_dim(model, xi0, opt);
        PredictionRow row;
        row.xi0 = xi0;
        row.xi = d.xi;
        row.zeta = d.zeta;
        row.xi_star = xs;
        row.predicted = d.value;
        row.branch = d.branch;
        row.closed_form = closed_form_image_dim(model, xi0).value_or(std::numeric_limits<double>::quiet_NaN());
        rows.push_back(row);
    }
    return rows;
}

std::vector<double> unit_grid(int n) {
    if (n < 2) {
        throw DomainError("grid needs at least two points");
    }
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        g[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
    }
    return g;
}

LegendrePoint legendre_point(const WeightModel& model, double q1, double q2, double xi0) {
    LegendrePoint p;
    p.q = {q1, q2};
    const double ph = phi(model, q1, q2);
    if (!std::isfinite(ph)) {
        throw DivergenceError("Phi(q) is infinite");
    }
    p.alpha = grad_phi(model, q1, q2);
    const double legendre = q1 * p.alpha[0] + q2 * p.alpha[1] - ph;
    p.dim_level_set = xi0 + legendre;
    p.in_j = legendre > -xi0;
    return p;
}

double restricted_image_dim(double alpha1, double alpha2, double dim_level_set, bool identical_weights) {
    if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) {
        throw DomainError("Hoelder exponents must be positive");
    }
    if (!(dim_level_set >= 0.0 && dim_level_set <= 1.0)) {
        throw DomainError("level-set dimension must lie in [0, 1]");
    }
    const double lo = std::min(alpha1, alpha2);
    const double hi = std::max(alpha1, alpha2);
    if (identical_weights) {
        return std::min(dim_level_set / lo, 1.0);
    }
    return std::min(dim_level_set / lo, 1.0 + (dim_level_set - lo) / hi);
}

std::vector<SpectrumCandidate> spectrum_candidates(const WeightModel& model, double xi0,
                                                   const RootOptions& opt) {
    const double xi = solve_xi(model, xi0, opt);
    const double zeta = solve_zeta(model, xi0, opt);
    const std::array<std::array<double, 2>, 4> qs{{{xi, 0.0}, {0.0, xi}, {zeta - 1.0, 1.0}, {1.0, zeta - 1.0}}};
    std::vector<SpectrumCandidate> out;
    for (const auto& q : qs) {
        SpectrumCandidate c;
        c.point = legendre_point(model, q[0], q[1], xi0);
        const double d = std::clamp(c.point.dim_level_set, 0.0, 1.0);
        c.image_dim = c.point.alpha[0] > 0.0 && c.point.alpha[1] > 0.0
                          ? restricted_image_dim(c.point.alpha[0], c.point.alpha[1], d, model.identical_weights())
                          : std::numeric_limits<double>::quiet_NaN();
        out.push_back(c);
    }
    return out;
}

double predicted_levelset_dim(const WeightModel& model, int k) {
    const auto* f = std::get_if<Fractional>(&model.kind());
    if (f == nullptr) {
        throw ScopeError("level-set dimension law holds for fractional models only");
    }
    if (k != 1 && k != 2) {
        throw DomainError("coordinate index must be 1 or 2");
    }
    return 1.0 - (k == 1 ? f->alpha1 : f->alpha2);
}

}  // namespace mcascade
