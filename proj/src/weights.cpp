#include "mcascade/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mcascade/errors.hpp"

namespace mcascade {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProbTol = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double modulus(int base, double alpha) {
    return alpha == 1.0 ? 1.0 / base : std::pow(static_cast<double>(base), -alpha);
}

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError(std::string(what) + " must be a probability in [0, 1]");
    }
}

void check_table(const SignTable& t) {
    double sum = 0.0;
    for (double p : t.p) {
        check_probability(p, "sign table entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbTol) {
        throw ConfigError("sign table probabilities must sum to 1");
    }
}

void check_alpha(double alpha, const char* what) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ConfigError(std::string(what) + " must lie in (0, 1]");
    }
}

void check_sigma(double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw ConfigError("sigma must be finite and >= 0");
    }
}

// |x|^q with 0^0 = 1 and 0^(q<0) = +inf.
double abs_pow(double x, double q) {
    const double a = std::abs(x);
    if (q == 0.0) {
        return 1.0;
    }
    if (a == 0.0) {
        return q > 0.0 ? 0.0 : kInf;
    }
    return std::pow(a, q);
}

double lognormal_factor_moment(double sigma, double s) {
    return std::exp(sigma * sigma * (s * s - s) / 2.0);
}

std::size_t pick(const std::vector<double>& cdf, double u) {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

std::array<double, 2> signs_of(std::size_t cell) {
    return {cell < 2 ? 1.0 : -1.0, (cell % 2 == 0) ? 1.0 : -1.0};
}

}  // namespace

SignTable SignTable::independent(double plus1, double plus2) {
    check_probability(plus1, "P(sign1 = +)");
    check_probability(plus2, "P(sign2 = +)");
    return {{plus1 * plus2, plus1 * (1.0 - plus2), (1.0 - plus1) * plus2,
             (1.0 - plus1) * (1.0 - plus2)}};
}

SignTable SignTable::identical(double plus) {
    check_probability(plus, "P(sign = +)");
    return {{plus, 0.0, 0.0, 1.0 - plus}};
}

double default_plus_probability(int base, double alpha) {
    return (1.0 + std::pow(static_cast<double>(base), alpha - 1.0)) / 2.0;
}

WeightModel::WeightModel(int base, Kind kind) : base_(base), kind_(std::move(kind)) {
    if (base < 2 || base > 36) {
        throw ConfigError("base must be in [2, 36]");
    }
    std::visit(
        overloaded{
            [&](const Fractional& f) {
                check_alpha(f.alpha1, "alpha1");
                check_alpha(f.alpha2, "alpha2");
                check_table(f.signs);
                magnitudes_ = {modulus(base_, f.alpha1), modulus(base_, f.alpha2)};
                identical_ = f.alpha1 == f.alpha2 && f.signs.discordant() == 0.0;
                cumulative_.resize(4);
                std::partial_sum(f.signs.p.begin(), f.signs.p.end(), cumulative_.begin());
            },
            [&](const LognormalSigned& l) {
                check_alpha(l.alpha, "alpha");
                check_sigma(l.sigma);
                check_table(l.signs);
                magnitudes_ = {modulus(base_, l.alpha), modulus(base_, l.alpha)};
                identical_ = l.signs.discordant() == 0.0;
                cumulative_.resize(4);
                std::partial_sum(l.signs.p.begin(), l.signs.p.end(), cumulative_.begin());
            },
            [&](const Mixed& m) {
                check_alpha(m.alpha, "alpha");
                check_sigma(m.sigma);
                check_probability(m.sign_plus, "sign_plus");
                magnitudes_ = {modulus(base_, m.alpha), 1.0 / base_};
                identical_ = m.alpha == 1.0 && m.sign_plus == 1.0;
            },
            [&](const DiscreteTable& d) {
                if (d.atoms.empty()) {
                    throw ConfigError("discrete table needs at least one atom");
                }
                double sum = 0.0;
                bool same = true;
                for (const Atom& a : d.atoms) {
                    check_probability(a.p, "atom probability");
                    if (!std::isfinite(a.w1) || !std::isfinite(a.w2)) {
                        throw ConfigError("atom values must be finite");
                    }
                    sum += a.p;
                    cumulative_.push_back(sum);
                    if (a.p > 0.0 && a.w1 != a.w2) {
                        same = false;
                    }
                }
                if (std::abs(sum - 1.0) > kProbTol) {
                    throw ConfigError("atom probabilities must sum to 1");
                }
                identical_ = same;
                magnitudes_ = {std::numeric_limits<double>::quiet_NaN(),
                               std::numeric_limits<double>::quiet_NaN()};
            },
        },
        kind_);
}

WeightModel WeightModel::fractional(int base, double alpha1, double alpha2) {
    return WeightModel(base, Fractional{alpha1, alpha2,
                                        SignTable::independent(default_plus_probability(base, alpha1),
                                                               default_plus_probability(base, alpha2))});
}

WeightModel WeightModel::fractional_identical(int base, double alpha) {
    return WeightModel(base,
                       Fractional{alpha, alpha, SignTable::identical(default_plus_probability(base, alpha))});
}

WeightModel WeightModel::lognormal_beta(int base, double alpha, double beta) {
    if (!(beta >= 0.0)) {
        throw ConfigError("beta must be >= 0");
    }
    const double plus = default_plus_probability(base, alpha);
    return WeightModel(base, LognormalSigned{alpha, std::sqrt(2.0 * beta * std::log(base)),
                                             SignTable::independent(plus, plus)});
}

WeightModel WeightModel::mixed_beta(int base, double alpha, double beta) {
    if (!(beta >= 0.0)) {
        throw ConfigError("beta must be >= 0");
    }
    return WeightModel(base, Mixed{alpha, std::sqrt(2.0 * beta * std::log(base)),
                                   default_plus_probability(base, alpha)});
}

WeightModel WeightModel::discrete(int base, std::vector<Atom> atoms) {
    return WeightModel(base, DiscreteTable{std::move(atoms)});
}

WeightModel WeightModel::identity(int base) {
    return WeightModel(base, Fractional{1.0, 1.0, SignTable{}});
}

std::string WeightModel::kind_name() const {
    return std::visit(overloaded{
                          [](const Fractional&) { return std::string("fractional"); },
                          [](const LognormalSigned&) { return std::string("lognormal"); },
                          [](const Mixed&) { return std::string("mixed"); },
                          [](const DiscreteTable&) { return std::string("discrete"); },
                      },
                      kind_);
}

double WeightModel::beta() const noexcept {
    const double lb = std::log(static_cast<double>(base_));
    if (const auto* l = std::get_if<LognormalSigned>(&kind_)) {
        return l->sigma * l->sigma / (2.0 * lb);
    }
    if (const auto* m = std::get_if<Mixed>(&kind_)) {
        return m->sigma * m->sigma / (2.0 * lb);
    }
    return 0.0;
}

WeightDraw sample(const WeightModel& model, RandomStream& stream) {
    const auto& mag = model.magnitudes();
    return std::visit(
        overloaded{
            [&](const Fractional&) {
                const auto s = signs_of(pick(model.cdf(), stream.uniform()));
                return WeightDraw{s[0] * mag[0], s[1] * mag[1]};
            },
            [&](const LognormalSigned& l) {
                const auto s = signs_of(pick(model.cdf(), stream.uniform()));
                const double y = stream.normal();
                const double factor = std::exp(l.sigma * y - l.sigma * l.sigma / 2.0);
                return WeightDraw{s[0] * mag[0] * factor, s[1] * mag[1] * factor};
            },
            [&](const Mixed& m) {
                const double s = stream.uniform() < m.sign_plus ? 1.0 : -1.0;
                const double y = stream.normal();
                const double factor = std::exp(m.sigma * y - m.sigma * m.sigma / 2.0);
                return WeightDraw{s * mag[0] * factor, mag[1] * factor};
            },
            [&](const DiscreteTable& d) {
                std::size_t i = pick(model.cdf(), stream.uniform());
                while (i > 0 && d.atoms[i].p == 0.0) {
                    --i;
                }
                return WeightDraw{d.atoms[i].w1, d.atoms[i].w2};
            },
        },
        model.kind());
}

double mean_weight(const WeightModel& model, int k) {
    if (k != 1 && k != 2) {
        throw DomainError("coordinate index must be 1 or 2");
    }
    const auto& mag = model.magnitudes();
    return std::visit(overloaded{
                          [&](const Fractional& f) {
                              const double plus = k == 1 ? f.signs.plus1() : f.signs.plus2();
                              return (2.0 * plus - 1.0) * mag[static_cast<std::size_t>(k - 1)];
                          },
                          [&](const LognormalSigned& l) {
                              const double plus = k == 1 ? l.signs.plus1() : l.signs.plus2();
                              return (2.0 * plus - 1.0) * mag[static_cast<std::size_t>(k - 1)];
                          },
                          [&](const Mixed& m) {
                              return k == 1 ? (2.0 * m.sign_plus - 1.0) * mag[0] : mag[1];
                          },
                          [&](const DiscreteTable& d) {
                              double s = 0.0;
                              for (const Atom& a : d.atoms) {
                                  s += a.p * (k == 1 ? a.w1 : a.w2);
                              }
                              return s;
                          },
                      },
                      model.kind());
}

double joint_moment(const WeightModel& model, double q1, double q2) {
    const double b = model.base();
    return std::visit(
        overloaded{
            [&](const Fractional& f) { return std::pow(b, -(q1 * f.alpha1 + q2 * f.alpha2)); },
            [&](const LognormalSigned& l) {
                const double s = q1 + q2;
                return std::pow(b, -l.alpha * s) * lognormal_factor_moment(l.sigma, s);
            },
            [&](const Mixed& m) {
                const double s = q1 + q2;
                return std::pow(b, -(m.alpha * q1 + q2)) * lognormal_factor_moment(m.sigma, s);
            },
            [&](const DiscreteTable& d) {
                double s = 0.0;
                for (const Atom& a : d.atoms) {
                    if (a.p == 0.0) {
                        continue;
                    }
                    const double x = abs_pow(a.w1, q1);
                    const double y = abs_pow(a.w2, q2);
                    if (x == kInf || y == kInf) {
                        return kInf;
                    }
                    s += a.p * x * y;
                }
                return s;
            },
        },
        model.kind());
}

double phi(const WeightModel& model, double q1, double q2) {
    const double lb = std::log(static_cast<double>(model.base()));
    return std::visit(overloaded{
                          [&](const Fractional& f) { return q1 * f.alpha1 + q2 * f.alpha2; },
                          [&](const LognormalSigned& l) {
                              const double s = q1 + q2;
                              return l.alpha * s - model.beta() * (s * s - s);
                          },
                          [&](const Mixed& m) {
                              const double s = q1 + q2;
                              return m.alpha * q1 + q2 - model.beta() * (s * s - s);
                          },
                          [&](const DiscreteTable&) {
                              const double mom = joint_moment(model, q1, q2);
                              if (mom == kInf) {
                                  return -kInf;
                              }
                              return -std::log(mom) / lb;
                          },
                      },
                      model.kind());
}

std::array<double, 2> grad_phi_numeric(const WeightModel& model, double q1, double q2, double h) {
    const double p1 = phi(model, q1 + h, q2);
    const double m1 = phi(model, q1 - h, q2);
    const double p2 = phi(model, q1, q2 + h);
    const double m2 = phi(model, q1, q2 - h);
    for (double v : {p1, m1, p2, m2, phi(model, q1, q2)}) {
        if (!std::isfinite(v)) {
            throw DivergenceError("Phi is infinite on the finite-difference stencil");
        }
    }
    return {(p1 - m1) / (2.0 * h), (p2 - m2) / (2.0 * h)};
}

std::array<double, 2> grad_phi(const WeightModel& model, double q1, double q2) {
    const double lb = std::log(static_cast<double>(model.base()));
    if (!std::isfinite(phi(model, q1, q2))) {
        throw DivergenceError("Phi is infinite at q");
    }
    if (const auto* f = std::get_if<Fractional>(&model.kind())) {
        return {f->alpha1, f->alpha2};
    }
    if (const auto* l = std::get_if<LognormalSigned>(&model.kind())) {
        const double g = l->alpha - model.beta() * (2.0 * (q1 + q2) - 1.0);
        return {g, g};
    }
    if (const auto* m = std::get_if<Mixed>(&model.kind())) {
        const double c = model.beta() * (2.0 * (q1 + q2) - 1.0);
        return {m->alpha - c, 1.0 - c};
    }
    // Discrete: -E(|W|^q ln|W_k|) / (E(|W|^q) ln b).
    const auto& d = std::get<DiscreteTable>(model.kind());
    double mass = 0.0;
    std::array<double, 2> acc{0.0, 0.0};
    for (const Atom& a : d.atoms) {
        if (a.p == 0.0) {
            continue;
        }
        const double weight = a.p * abs_pow(a.w1, q1) * abs_pow(a.w2, q2);
        if (weight == 0.0) {
            continue;
        }
        const std::array<double, 2> w{std::abs(a.w1), std::abs(a.w2)};
        for (std::size_t k = 0; k < 2; ++k) {
            if (w[k] == 0.0) {
                // zero modulus at zero exponent: log-derivative is unbounded
                return grad_phi_numeric(model, q1, q2);
            }
            acc[k] += weight * std::log(w[k]);
        }
        mass += weight;
    }
    return {-acc[0] / (mass * lb), -acc[1] / (mass * lb)};
}

double max_marginal_moment(const WeightModel& model, double p) {
    return std::max(joint_moment(model, p, 0.0), joint_moment(model, 0.0, p));
}

double max_cross_moment(const WeightModel& model, double p) {
    return std::max(joint_moment(model, p - 1.0, 1.0), joint_moment(model, 1.0, p - 1.0));
}

bool lognormal_a1_closed_form(double alpha, double beta) {
    if (!(beta < 1.0) || alpha > 1.0) {
        return false;
    }
    if (beta >= 0.25) {
        return 2.0 * std::sqrt(beta) - beta < alpha;
    }
    return beta + 0.5 < alpha;
}

AssumptionReport check_assumptions(const WeightModel& model) {
    AssumptionReport r;
    std::ostringstream notes;
    const double target = 1.0 / model.base();

    r.means = {mean_weight(model, 1), mean_weight(model, 2)};
    r.a0_ok = std::abs(r.means[0] - target) <= 1e-12 && std::abs(r.means[1] - target) <= 1e-12;
    if (!r.a0_ok) {
        notes << "A0: E(W1)=" << r.means[0] << ", E(W2)=" << r.means[1] << ", expected " << target
              << ". ";
    }

    // (A1): scan (1, 2] on a 512-point grid, then golden-section refine
    // around the best grid point.
    auto f = [&](double q) { return max_marginal_moment(model, q); };
    constexpr int kGrid = 512;
    double best_q = 2.0;
    double best_v = std::numeric_limits<double>::infinity();
    int best_i = kGrid;
    for (int i = 1; i <= kGrid; ++i) {
        const double q = 1.0 + static_cast<double>(i) / kGrid;
        const double v = f(q);
        if (v < best_v) {
            best_v = v;
            best_q = q;
            best_i = i;
        }
    }
    if (!(best_v < target)) {
        double lo = 1.0 + static_cast<double>(std::max(best_i - 1, 0)) / kGrid;
        double hi = 1.0 + static_cast<double>(std::min(best_i + 1, kGrid)) / kGrid;
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int it = 0; it < 80; ++it) {
            const double a = hi - g * (hi - lo);
            const double c = lo + g * (hi - lo);
            if (f(a) < f(c)) {
                hi = c;
            } else {
                lo = a;
            }
        }
        const double q = std::clamp((lo + hi) / 2.0, std::nextafter(1.0, 2.0), 2.0);
        if (f(q) < best_v) {
            best_v = f(q);
            best_q = q;
        }
    }
    r.a1_scan = best_v < target;
    r.a1_ok = r.a1_scan;
    r.a1_witness = best_q;

    const auto closed_form = std::visit(
        overloaded{
            [&](const Fractional& fr) -> std::optional<std::pair<bool, double>> {
                return std::pair{std::min(fr.alpha1, fr.alpha2) > 0.5, 2.0};
            },
            [&](const LognormalSigned& l) -> std::optional<std::pair<bool, double>> {
                const double beta = model.beta();
                const double qstar = beta > 0.0 ? (l.alpha + beta) / (2.0 * beta) : 2.0;
                return std::pair{lognormal_a1_closed_form(l.alpha, beta),
                                 std::clamp(qstar, std::nextafter(1.0, 2.0), 2.0)};
            },
            [&](const Mixed& m) -> std::optional<std::pair<bool, double>> {
                const double beta = model.beta();
                const double qstar = beta > 0.0 ? (m.alpha + beta) / (2.0 * beta) : 2.0;
                return std::pair{lognormal_a1_closed_form(m.alpha, beta),
                                 std::clamp(qstar, std::nextafter(1.0, 2.0), 2.0)};
            },
            [&](const DiscreteTable&) -> std::optional<std::pair<bool, double>> {
                return std::nullopt;
            },
        },
        model.kind());
    if (closed_form) {
        r.a1_closed_form = closed_form->first;
        if (closed_form->first != r.a1_scan) {
            notes << "A1: grid scan (" << (r.a1_scan ? "ok" : "fail")
                  << ") disagrees with closed form; closed form wins. ";
        }
        r.a1_ok = closed_form->first;
        if (r.a1_ok && !(f(r.a1_witness) < target)) {
            r.a1_witness = closed_form->second;
        }
    }
    if (!r.a1_ok) {
        r.a1_witness = std::numeric_limits<double>::quiet_NaN();
        notes << "A1: no q in (1,2] with E|W1|^q v E|W2|^q < 1/b (min " << best_v << " at q=" << best_q
              << "). ";
    }

    // (A2): bounded-away-from-zero moduli for the parametric kinds; for a
    // finite table, no atom may carry a zero coordinate.
    r.a2_ok = true;
    if (const auto* d = std::get_if<DiscreteTable>(&model.kind())) {
        for (const Atom& a : d->atoms) {
            if (a.p > 0.0 && (a.w1 == 0.0 || a.w2 == 0.0)) {
                r.a2_ok = false;
            }
        }
    }
    r.a2_witness = r.a2_ok ? 3.0 : std::numeric_limits<double>::quiet_NaN();
    if (!r.a2_ok) {
        notes << "A2: an atom with positive probability has a zero coordinate. ";
    }
    r.notes = notes.str();
    return r;
}

}  // namespace mcascade
