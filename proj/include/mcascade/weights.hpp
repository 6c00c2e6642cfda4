#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mcascade/rng.hpp"

namespace mcascade {

/// Joint law of the signs of (W1, W2): probabilities of (+,+), (+,-),
/// (-,+), (-,-) in that order.
struct SignTable {
    std::array<double, 4> p{1.0, 0.0, 0.0, 0.0};

    static SignTable independent(double plus1, double plus2);
    /// Both signs equal, P(+) = plus.
    static SignTable identical(double plus);

    double plus1() const noexcept { return p[0] + p[1]; }
    double plus2() const noexcept { return p[0] + p[2]; }
    /// Probability that the two signs differ.
    double discordant() const noexcept { return p[1] + p[2]; }
};

/// Default sign marginal (1 + b^(alpha-1)) / 2, the one that makes E(W) = 1/b
/// for a modulus b^-alpha.
double default_plus_probability(int base, double alpha);

/// |W_k| = b^-alpha_k almost surely, random signs.
struct Fractional {
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    SignTable signs;
};

/// W_k = X_k e^(sigma Y - sigma^2/2) with one shared Gaussian Y and
/// X_k = +-b^-alpha.
struct LognormalSigned {
    double alpha = 1.0;
    double sigma = 0.0;
    SignTable signs;
};

/// W1 = X1 e^(sigma Y - sigma^2/2), W2 = b^-1 e^(sigma Y - sigma^2/2).
struct Mixed {
    double alpha = 1.0;
    double sigma = 0.0;
    double sign_plus = 1.0;  // P(X1 > 0)
};

struct Atom {
    double w1 = 0.0;
    double w2 = 0.0;
    double p = 0.0;
};

/// Finite-support law.
struct DiscreteTable {
    std::vector<Atom> atoms;
};

/// Immutable law of the weight vector W = (W1, W2) over base b.
class WeightModel {
public:
    using Kind = std::variant<Fractional, LognormalSigned, Mixed, DiscreteTable>;

    WeightModel(int base, Kind kind);

    /// Fractional(alpha1, alpha2) with independent signs and default marginals.
    static WeightModel fractional(int base, double alpha1, double alpha2);
    /// Fractional(alpha, alpha) with W1 = W2.
    static WeightModel fractional_identical(int base, double alpha);
    /// Lognormal law with independent signs; beta = sigma^2 / (2 ln b).
    static WeightModel lognormal_beta(int base, double alpha, double beta);
    /// Mixed law: W1 = +-b^-alpha L, W2 = b^-1 L with one lognormal L; beta = sigma^2 / (2 ln b).
    static WeightModel mixed_beta(int base, double alpha, double beta);
    static WeightModel discrete(int base, std::vector<Atom> atoms);
    /// W1 = W2 = 1/b, so F is the identity on both coordinates.
    static WeightModel identity(int base);

    int base() const noexcept { return base_; }
    const Kind& kind() const noexcept { return kind_; }
    std::string kind_name() const;

    /// Certified P(W1 = W2) = 1, read off the parameters (never estimated).
    bool identical_weights() const noexcept { return identical_; }

    /// sigma^2 / (2 ln b) for the lognormal kinds, 0 otherwise.
    double beta() const noexcept;

    /// b^-alpha_k for the moduli of the two-point sign parts; cached.
    const std::array<double, 2>& magnitudes() const noexcept { return magnitudes_; }

    /// Cumulative probabilities of the sign table (four cells) or of the
    /// atom list, in declaration order. Empty for Mixed.
    const std::vector<double>& cdf() const noexcept { return cumulative_; }

private:
    int base_;
    Kind kind_;
    bool identical_ = false;
    std::array<double, 2> magnitudes_{};
    std::vector<double> cumulative_;  // sign-table or atom CDF
};

struct WeightDraw {
    double w1 = 0.0;
    double w2 = 0.0;
};

/// One draw of W. Consumes a kind-dependent but fixed number of values from
/// the stream.
WeightDraw sample(const WeightModel& model, RandomStream& stream);

/// E(W_k), analytically.
double mean_weight(const WeightModel& model, int k);

/// E(|W1|^q1 |W2|^q2); +inf when a zero modulus meets a negative exponent.
double joint_moment(const WeightModel& model, double q1, double q2);

/// Phi(q) = -log_b E(|W1|^q1 |W2|^q2); -inf iff the moment is infinite.
double phi(const WeightModel& model, double q1, double q2);

/// Gradient of Phi; analytic where the kind allows, central differences
/// otherwise. Throws DivergenceError when Phi is infinite near q.
std::array<double, 2> grad_phi(const WeightModel& model, double q1, double q2);

/// Central-difference gradient with step h.
std::array<double, 2> grad_phi_numeric(const WeightModel& model, double q1, double q2,
                                       double h = 1e-5);

/// E(|W1|^p) v E(|W2|^p)
double max_marginal_moment(const WeightModel& model, double p);
/// E(|W1|^(p-1) |W2|) v E(|W1| |W2|^(p-1))
double max_cross_moment(const WeightModel& model, double p);

struct AssumptionReport {
    bool a0_ok = false;
    bool a1_ok = false;
    double a1_witness = 0.0;  // q in (1, 2]; NaN when a1 fails
    bool a2_ok = false;
    double a2_witness = 0.0;  // s > 2; NaN when a2 fails
    std::array<double, 2> means{};
    /// Closed-form (A1) answer where one exists.
    std::optional<bool> a1_closed_form;
    /// Grid scan answer before any closed-form override.
    bool a1_scan = false;
    std::string notes;

    bool ok() const noexcept { return a0_ok && a1_ok && a2_ok; }
};

AssumptionReport check_assumptions(const WeightModel& model);

/// Condition (A1) for the lognormal kinds in closed form:
/// beta < 1 and alpha > 2 sqrt(beta) - beta (beta >= 1/4) or
/// alpha > beta + 1/2 (beta < 1/4).
bool lognormal_a1_closed_form(double alpha, double beta);

}  // namespace mcascade
