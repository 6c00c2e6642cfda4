#include <cmath>

#include "doctest.h"
#include "mcascade/errors.hpp"
#include "mcascade/model_io.hpp"

using namespace mcascade;

TEST_CASE("parse each kind") {
    const WeightModel f = parse_model("# fractional\nkind = fractional\nbase = 2\nalpha = 0.75\n");
    CHECK(f.kind_name() == "fractional");
    CHECK(phi(f, 1, 1) == doctest::Approx(1.5));
    CHECK_FALSE(f.identical_weights());

    const WeightModel same = parse_model("kind = fractional\nbase = 3\nalpha = 0.8\nsigns = identical\n");
    CHECK(same.identical_weights());

    const WeightModel l = parse_model("kind = lognormal\nbase = 2\nalpha = 0.8\nbeta = 0.25\n");
    CHECK(l.beta() == doctest::Approx(0.25).epsilon(1e-14));
    const WeightModel ls = parse_model("kind=lognormal\nbase=2\nalpha=0.8\nsigma=0.5\n");
    CHECK(ls.beta() == doctest::Approx(0.25 / (2 * std::log(2.0))).epsilon(1e-14));

    const WeightModel m = parse_model("kind = mixed\nbase = 2\nalpha = 0.8\nbeta = 0.1\n");
    CHECK(m.kind_name() == "mixed");

    const WeightModel d = parse_model("kind = discrete\nbase = 2\natom = 0.5 0.5 0.5\natom = 0.5 0.5 0.5\n");
    CHECK(std::get<DiscreteTable>(d.kind()).atoms.size() == 2);

    const WeightModel t = parse_model(
        "kind = fractional\nbase = 2\nalpha1 = 0.6\nalpha2 = 0.8\nsigns = table\nsign_table = 0.7 0.1 0.1 0.1\n");
    const auto& fr = std::get<Fractional>(t.kind());
    CHECK(fr.signs.p[0] == 0.7);
    CHECK(fr.alpha2 == 0.8);
}

TEST_CASE("malformed files are config errors") {
    CHECK_THROWS_AS(parse_model("kind = fractional\nbase = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_model("kind = fractional\nbase = 2\nalpha = 0.7\nalpha = 0.8\n"), ConfigError);
    CHECK_THROWS_AS(parse_model("kind = fractional\nbase = 2\nalpha = 0.7\ncolour = red\n"), ConfigError);
    CHECK_THROWS_AS(parse_model("kind = lognormal\nbase = 2\nalpha = 0.7\nbeta = 0.1\nsigma = 0.2\n"), ConfigError);
    CHECK_THROWS_AS(parse_model("kind = spline\nbase = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_model("kind = fractional\nbase = 1\nalpha = 0.7\n"), ConfigError);
    CHECK_THROWS_AS(parse_model("kind = fractional\nbase = 2\nalpha = x\n"), ConfigError);
    CHECK_THROWS_AS(parse_model("kind fractional\n"), ConfigError);
    CHECK_THROWS_AS(parse_model("kind = discrete\nbase = 2\natom = 0.5 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_model("kind = fractional\nbase = 2\nalpha = 0.7\natom = 0.5 0.5 1\n"), ConfigError);
}

TEST_CASE("canonical text round-trips exactly") {
    const std::vector<WeightModel> models{
        WeightModel::fractional(2, 0.75, 0.6), WeightModel::fractional_identical(5, 0.9),
        WeightModel::lognormal_beta(2, 0.8, 0.1), WeightModel::mixed_beta(3, 0.85, 0.07),
        WeightModel::discrete(2, {{0.1 / 3, -0.7, 0.25}, {0.6, 0.9, 0.75}})};
    for (const auto& m : models) {
        const std::string text = to_text(m);
        const WeightModel back = parse_model(text);
        CHECK(to_text(back) == text);
        CHECK(model_digest(back) == model_digest(m));
        CHECK(back.identical_weights() == m.identical_weights());
        CHECK(phi(back, 0.7, 1.3) == phi(m, 0.7, 1.3));
    }
    CHECK(model_digest(models[0]).size() == 16);
    CHECK(model_digest(models[0]) != model_digest(models[1]));
}
