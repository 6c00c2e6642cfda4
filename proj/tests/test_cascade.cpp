#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "mcascade/cascade.hpp"
#include "mcascade/errors.hpp"

using namespace mcascade;

namespace {

WeightModel positive_model() {
    // all weights positive, E W = 1/2
    return WeightModel::discrete(2, {{0.3, 0.2, 0.5}, {0.7, 0.8, 0.5}});
}

WeightModel two_atom_model() {
    return WeightModel::discrete(2, {{0.9, -0.3, 0.5}, {0.1, 1.3, 0.5}});
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) {
            ++i;
        }
        while (j < b.size() && b[j] <= x) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

}  // namespace

TEST_CASE("identity laws give the identity map") {
    for (const auto& m : {WeightModel::identity(2), WeightModel::discrete(3, {{1.0 / 3, 1.0 / 3, 1.0}})}) {
        const CascadeRealization r = build(m, 9, m.base() == 2 ? 10 : 6);
        const auto g1 = r.grid(1);
        const auto g2 = r.grid(2);
        const double cells = static_cast<double>(g1.size() - 1);
        for (std::size_t j = 0; j < g1.size(); ++j) {
            CHECK(g1[j] == doctest::Approx(j / cells).epsilon(1e-12));
            CHECK(g2[j] == doctest::Approx(j / cells).epsilon(1e-12));
        }
        for (int lvl = 0; lvl <= 4; ++lvl) {
            CHECK(r.oscillation(lvl, 0, 1) == doctest::Approx(std::pow(m.base(), -lvl)).epsilon(1e-12));
        }
    }
}

TEST_CASE("partial products") {
    const WeightModel m = WeightModel::fractional(2, 0.75, 0.6);
    const CascadeRealization r = build(m, 4, 10);
    const auto root = partial_product(r, Word(2));
    CHECK(root[0] == 1.0);
    CHECK(root[1] == 1.0);
    for (std::uint64_t idx : {0ull, 5ull, 77ull, 1023ull}) {
        const Word w = Word::from_index(2, 10, idx);
        const auto q = partial_product(r, w);
        CHECK(std::abs(q[0]) == doctest::Approx(std::pow(2.0, -0.75 * 10)).epsilon(1e-12));
        CHECK(std::abs(q[1]) == doctest::Approx(std::pow(2.0, -0.6 * 10)).epsilon(1e-12));
    }
    // oracle: multiply node weights drawn straight from the generator
    const WeightModel l = WeightModel::lognormal_beta(3, 0.8, 0.1);
    const CascadeRealization rl = build(l, 12, 6);
    for (std::uint64_t idx : {0ull, 100ull, 728ull}) {
        const Word w = Word::from_index(3, 6, idx);
        double p1 = 1.0, p2 = 1.0;
        for (int m2 = 1; m2 <= 6; ++m2) {
            const WeightDraw d = node_weight(l, 12, m2, w.prefix(m2).index());
            p1 *= d.w1;
            p2 *= d.w2;
        }
        const auto q = partial_product(rl, w);
        CHECK(q[0] == doctest::Approx(p1).epsilon(1e-13));
        CHECK(q[1] == doctest::Approx(p2).epsilon(1e-13));
    }
    CHECK_THROWS_AS(partial_product(r, Word::from_index(2, 11, 0)), DomainError);
}

TEST_CASE("increments") {
    const WeightModel m = WeightModel::lognormal_beta(2, 0.8, 0.1);
    const CascadeRealization r = build(m, 3, 12);
    const auto top = increment(r, Word(2));
    CHECK(top[0] == r.grid(1).back());
    CHECK(top[1] == r.grid(2).back());
    const Word leaf = Word::from_index(2, 12, 1234);
    const auto inc = increment(r, leaf);
    const auto q = partial_product(r, leaf);
    CHECK(inc[0] == doctest::Approx(q[0]).epsilon(1e-9));
    CHECK(inc[1] == doctest::Approx(q[1]).epsilon(1e-9));
    // telescoping over children
    for (int lvl = 0; lvl < 12; ++lvl) {
        const Word w = Word::from_index(2, lvl, lvl == 0 ? 0 : 1);
        const auto parent = increment(r, w);
        double s1 = 0, s2 = 0;
        for (int d = 0; d < 2; ++d) {
            const auto c = increment(r, w.child(d));
            s1 += c[0];
            s2 += c[1];
        }
        CHECK(std::abs(s1 - parent[0]) <= 1e-10 * std::max(1.0, std::abs(parent[0])));
        CHECK(std::abs(s2 - parent[1]) <= 1e-10 * std::max(1.0, std::abs(parent[1])));
    }
}

TEST_CASE("oscillations: pyramid agrees with a direct scan") {
    const CascadeRealization r = build(WeightModel::mixed_beta(2, 0.8, 0.1), 5, 10);
    for (int lvl : {0, 3, 7, 10}) {
        const OscillationTable t = oscillations(r, lvl);
        for (std::size_t i = 0; i < t.o1.size(); ++i) {
            CHECK(r.oscillation(lvl, i, 1) == t.o1[i]);
            CHECK(r.oscillation(lvl, i, 2) == t.o2[i]);
        }
    }
    // monotone paths: oscillation is the increment
    const CascadeRealization p = build(positive_model(), 5, 10);
    for (int lvl : {1, 4, 9}) {
        for (std::uint64_t i = 0; i < std::min<std::uint64_t>(4, p.cells(lvl)); ++i) {
            const auto inc = increment(p, Word::from_index(2, lvl, i));
            CHECK(p.oscillation(lvl, i, 1) == doctest::Approx(inc[0]).epsilon(1e-12));
            CHECK(p.oscillation(lvl, i, 2) == doctest::Approx(inc[1]).epsilon(1e-12));
        }
    }
}

TEST_CASE("determinism, thread independence and prefix stability") {
    const WeightModel m = WeightModel::lognormal_beta(2, 0.8, 0.1);
    BuildOptions one;
    one.threads = 1;
    const CascadeRealization a = build(m, 77, 12);
    const CascadeRealization b = build(m, 77, 12, one);
    const CascadeRealization c = build(m, 77, 13);
    const auto ga = a.grid(1), gb = b.grid(1);
    CHECK(std::equal(ga.begin(), ga.end(), gb.begin(), gb.end()));
    for (int lvl = 1; lvl <= 12; ++lvl) {
        for (int k = 1; k <= 2; ++k) {
            const auto pa = a.products(lvl, k), pc = c.products(lvl, k);
            CHECK(std::equal(pa.begin(), pa.end(), pc.begin(), pc.end()));
        }
    }
    const CascadeRealization other = build(m, 78, 12);
    CHECK(other.grid(1).back() != ga.back());
}

TEST_CASE("martingale normalization over seeds") {
    const WeightModel m = WeightModel::fractional(2, 0.75, 0.75);
    const int seeds = 300;
    double s = 0, ss = 0;
    for (int i = 0; i < seeds; ++i) {
        const double f = build(m, 1000 + i, 8).grid(2).back();
        s += f;
        ss += f * f;
    }
    const double mean = s / seeds;
    const double sd = std::sqrt(ss / seeds - mean * mean);
    CHECK(std::abs(mean - 1.0) <= 4 * sd / std::sqrt(seeds));
}

TEST_CASE("self-similarity: O/|Q| has the same law at every level") {
    // Words at level m of a depth m+8 tree carry independent 8-level subtrees.
    const WeightModel f = WeightModel::fractional(2, 0.75, 0.75);
    std::vector<double> shallow, deep;
    for (int seed = 0; seed < 120; ++seed) {
        const CascadeRealization a = build(f, 500 + seed, 9);
        for (std::uint64_t i = 0; i < 2; ++i) {
            shallow.push_back(a.oscillation(1, i, 1) / std::abs(a.products(1, 1)[i]));
        }
        const CascadeRealization b = build(f, 900 + seed, 13);
        for (std::uint64_t i = 0; i < 32; ++i) {
            deep.push_back(b.oscillation(5, i, 1) / std::abs(b.products(5, 1)[i]));
        }
    }
    const double n = shallow.size(), m = deep.size();
    // 1% critical value of the two-sample test
    CHECK(ks_statistic(shallow, deep) < 1.628 * std::sqrt((n + m) / (n * m)));
}

TEST_CASE("tilted sampling") {
    SUBCASE("zero tilt gives uniform digits") {
        const CascadeRealization r = build(WeightModel::lognormal_beta(2, 0.8, 0.1), 2, 10);
        const TiltedSampler s(r, 0, 0);
        RandomStream st(1, 5);
        int ones = 0;
        const int draws = 10000;
        for (int i = 0; i < draws / 10; ++i) {
            const Word w = s.sample(10, st);
            for (int d : w.digits()) {
                ones += d;
            }
        }
        CHECK(std::abs(ones - draws / 2.0) <= 4 * std::sqrt(draws / 4.0));
    }
    SUBCASE("fractional weights give uniform child probabilities") {
        const CascadeRealization r = build(WeightModel::fractional(3, 0.6, 0.9), 2, 6);
        for (auto mode : {TiltMode::NodeNormalized, TiltMode::SubtreeMass}) {
            const TiltedSampler s(r, 1.3, 0.4, mode);
            for (std::uint64_t i = 0; i < 9; ++i) {
                for (double p : s.child_probabilities(2, i)) {
                    CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));
                }
            }
        }
    }
    SUBCASE("two-atom law: probabilities by direct enumeration") {
        const WeightModel m = two_atom_model();
        const int n = 6;
        const CascadeRealization r = build(m, 8, n);
        const double q1 = 1.0, q2 = 0.5;
        const auto tilt = [&](int lvl, std::uint64_t idx) {
            const WeightDraw d = node_weight(m, 8, lvl, idx);
            return std::pow(std::abs(d.w1), q1) * std::pow(std::abs(d.w2), q2);
        };
        // mass(w) = sum over leaves below w of the tilted products from w down
        const auto mass = [&](auto&& self, int lvl, std::uint64_t idx) -> double {
            if (lvl == n) {
                return 1.0;
            }
            double s = 0;
            for (std::uint64_t d = 0; d < 2; ++d) {
                s += tilt(lvl + 1, 2 * idx + d) * self(self, lvl + 1, 2 * idx + d);
            }
            return s;
        };
        const TiltedSampler node(r, q1, q2, TiltMode::NodeNormalized);
        const TiltedSampler exact(r, q1, q2, TiltMode::SubtreeMass);
        for (int lvl : {0, 2, 5}) {
            for (std::uint64_t idx = 0; idx < 4 && idx < (1u << lvl); ++idx) {
                const double t0 = tilt(lvl + 1, 2 * idx), t1 = tilt(lvl + 1, 2 * idx + 1);
                const auto pn = node.child_probabilities(lvl, idx);
                CHECK(pn[0] == doctest::Approx(t0 / (t0 + t1)).epsilon(1e-12));
                const double m0 = t0 * mass(mass, lvl + 1, 2 * idx), m1 = t1 * mass(mass, lvl + 1, 2 * idx + 1);
                const auto pe = exact.child_probabilities(lvl, idx);
                CHECK(pe[0] == doctest::Approx(m0 / (m0 + m1)).epsilon(1e-10));
            }
        }
    }
    SUBCASE("lazy path sampler follows the node-normalized rule") {
        const CascadeRealization r = build(two_atom_model(), 4, 10);
        const TiltedSampler s(r, 1, 1);
        RandomStream a(3, 3), b(3, 3);
        for (int i = 0; i < 50; ++i) {
            CHECK(s.sample(10, a) == sample_tilted_path(r, 1, 1, 10, b));
        }
    }
}

TEST_CASE("export and cache") {
    const WeightModel m = WeightModel::lognormal_beta(2, 0.8, 0.1);
    const CascadeRealization r = build(m, 6, 8);
    std::ostringstream csv;
    export_level_csv(r, 3, csv);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "word,Q1,Q2,F1_end,F2_end");
    int rows = 0;
    std::string last;
    while (std::getline(in, line)) {
        ++rows;
        last = line;
    }
    CHECK(rows == 8);
    CHECK(last.rfind("111,", 0) == 0);

    const auto dir = std::filesystem::temp_directory_path() / "mcascade_cache_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / cache_file_name(m, 6, 8);
    save_realization(r, path);
    const CascadeRealization back = load_realization(path, m);
    const auto g = r.grid(2), gb = back.grid(2);
    CHECK(std::equal(g.begin(), g.end(), gb.begin(), gb.end()));
    CHECK(back.range_max(4, 1)[3] == r.range_max(4, 1)[3]);
    CHECK_THROWS_AS(load_realization(path, WeightModel::lognormal_beta(2, 0.8, 0.2)), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("budget and depth checks") {
    CHECK_THROWS_AS(build(WeightModel::identity(2), 1, 40), ResourceError);
    CHECK_THROWS_AS(build(WeightModel::identity(2), 1, 0), DomainError);
    CHECK(default_depth(2) == 18);
    CHECK(default_depth(3) == 12);
    CHECK(default_depth(4) == 10);
}
