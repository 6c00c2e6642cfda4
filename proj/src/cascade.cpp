#include "mcascade/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <thread>

#include "mcascade/errors.hpp"
#include "mcascade/model_io.hpp"

namespace mcascade {

namespace {

constexpr char kCacheMagic[8] = {'M', 'C', 'A', 'S', 'C', 'A', 'D', '1'};

std::uint64_t level_size(int base, int level) {
    return checked_pow(static_cast<std::uint64_t>(base), level);
}

template <class Fn>
void parallel_for(std::uint64_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n < 4096) {
        fn(std::uint64_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::uint64_t lo = t * chunk;
        const std::uint64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) {
            break;
        }
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& th : pool) {
        th.join();
    }
}

double tilt_factor(const WeightDraw& w, double q1, double q2) {
    const auto term = [](double x, double q) {
        if (q == 0.0) {
            return 1.0;
        }
        const double a = std::abs(x);
        if (a == 0.0) {
            return q > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
        return std::pow(a, q);
    };
    return term(w.w1, q1) * term(w.w2, q2);
}

void check_word(const CascadeRealization& real, const Word& w) {
    if (w.base() != real.base()) {
        throw DomainError("word base does not match the realization");
    }
    if (w.length() > real.depth()) {
        throw DomainError("word length " + std::to_string(w.length()) + " exceeds depth " +
                          std::to_string(real.depth()));
    }
}

int pick_digit(const double* weights, int b, double u) {
    double total = 0.0;
    for (int j = 0; j < b; ++j) {
        total += weights[j];
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw DivergenceError("tilted weights of all children vanish (or overflow)");
    }
    double target = u * total;
    for (int j = 0; j < b; ++j) {
        if (target < weights[j]) {
            return j;
        }
        target -= weights[j];
    }
    for (int j = b - 1; j >= 0; --j) {
        if (weights[j] > 0.0) {
            return j;
        }
    }
    return b - 1;
}

}  // namespace

int default_depth(int base) {
    switch (base) {
        case 2: return 18;
        case 3: return 12;
        case 4: return 10;
        default: {
            int n = 1;
            while (std::pow(static_cast<double>(base), n + 2) <= std::ldexp(1.0, 22)) {
                ++n;
            }
            return n;
        }
    }
}

CascadeRealization::CascadeRealization(WeightModel model, std::uint64_t seed, int depth)
    : model_(std::move(model)), seed_(seed), depth_(depth) {}

std::uint64_t CascadeRealization::cells(int level) const { return level_size(base(), level); }

std::span<const double> CascadeRealization::products(int level, int k) const {
    if (level < 0 || level > depth_ || (k != 1 && k != 2)) {
        throw DomainError("products: level or coordinate out of range");
    }
    return products_[static_cast<std::size_t>(level)][static_cast<std::size_t>(k - 1)];
}

std::span<const double> CascadeRealization::grid(int k) const {
    if (k != 1 && k != 2) {
        throw DomainError("grid: coordinate must be 1 or 2");
    }
    return grid_[static_cast<std::size_t>(k - 1)];
}

std::span<const double> CascadeRealization::range_min(int level, int k) const {
    if (level < 0 || level > depth_ || (k != 1 && k != 2)) {
        throw DomainError("range_min: level or coordinate out of range");
    }
    return min_[static_cast<std::size_t>(level)][static_cast<std::size_t>(k - 1)];
}

std::span<const double> CascadeRealization::range_max(int level, int k) const {
    if (level < 0 || level > depth_ || (k != 1 && k != 2)) {
        throw DomainError("range_max: level or coordinate out of range");
    }
    return max_[static_cast<std::size_t>(level)][static_cast<std::size_t>(k - 1)];
}

double CascadeRealization::oscillation(int level, std::uint64_t index, int k) const {
    return range_max(level, k)[index] - range_min(level, k)[index];
}

void CascadeRealization::fill_grid_and_ranges() {
    const auto n = static_cast<std::size_t>(depth_);
    const std::uint64_t leaves = cells(depth_);
    const auto b = static_cast<std::uint64_t>(base());
    min_.assign(n + 1, {});
    max_.assign(n + 1, {});
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& q = products_[n][k];
        auto& f = grid_[k];
        f.assign(leaves + 1, 0.0);
        for (std::uint64_t j = 0; j < leaves; ++j) {
            f[j + 1] = f[j] + q[j];
        }
        auto& lo = min_[n][k];
        auto& hi = max_[n][k];
        lo.resize(leaves);
        hi.resize(leaves);
        for (std::uint64_t j = 0; j < leaves; ++j) {
            lo[j] = std::min(f[j], f[j + 1]);
            hi[j] = std::max(f[j], f[j + 1]);
        }
        for (std::size_t m = n; m-- > 0;) {
            const std::uint64_t size = cells(static_cast<int>(m));
            auto& plo = min_[m][k];
            auto& phi = max_[m][k];
            plo.resize(size);
            phi.resize(size);
            const auto& clo = min_[m + 1][k];
            const auto& chi = max_[m + 1][k];
            for (std::uint64_t i = 0; i < size; ++i) {
                double a = clo[i * b];
                double c = chi[i * b];
                for (std::uint64_t j = 1; j < b; ++j) {
                    a = std::min(a, clo[i * b + j]);
                    c = std::max(c, chi[i * b + j]);
                }
                plo[i] = a;
                phi[i] = c;
            }
        }
    }
}

WeightDraw node_weight(const WeightModel& model, std::uint64_t seed, int level, std::uint64_t index) {
    RandomStream stream = RandomStream::for_node(seed, level, index);
    return sample(model, stream);
}

CascadeRealization build(const WeightModel& model, std::uint64_t seed, int depth,
                         const BuildOptions& options) {
    if (depth < 1) {
        throw DomainError("depth must be >= 1");
    }
    std::uint64_t budget_cells = 0;
    try {
        budget_cells = level_size(model.base(), depth + 1);
    } catch (const DomainError&) {
        throw ResourceError("b^(depth+1) overflows the cell counter");
    }
    if (budget_cells > options.max_cells) {
        throw ResourceError("b^(depth+1) = " + std::to_string(budget_cells) + " exceeds the budget of " +
                            std::to_string(options.max_cells) + " cells");
    }

    CascadeRealization real(model, seed, depth);
    const unsigned threads = options.threads != 0 ? options.threads
                                                   : std::max(1u, std::thread::hardware_concurrency());
    const auto b = static_cast<std::uint64_t>(model.base());
    real.products_.resize(static_cast<std::size_t>(depth) + 1);
    real.products_[0] = {std::vector<double>{1.0}, std::vector<double>{1.0}};
    for (int m = 1; m <= depth; ++m) {
        const std::uint64_t size = level_size(model.base(), m);
        auto& level = real.products_[static_cast<std::size_t>(m)];
        const auto& parent = real.products_[static_cast<std::size_t>(m - 1)];
        level[0].resize(size);
        level[1].resize(size);
        parallel_for(size, threads, [&](std::uint64_t lo, std::uint64_t hi) {
            for (std::uint64_t i = lo; i < hi; ++i) {
                const WeightDraw w = node_weight(model, seed, m, i);
                level[0][i] = parent[0][i / b] * w.w1;
                level[1][i] = parent[1][i / b] * w.w2;
            }
        });
    }
    real.fill_grid_and_ranges();
    return real;
}

std::array<double, 2> partial_product(const CascadeRealization& real, const Word& w) {
    check_word(real, w);
    const std::uint64_t i = w.index();
    return {real.products(w.length(), 1)[i], real.products(w.length(), 2)[i]};
}

std::array<double, 2> increment(const CascadeRealization& real, const Word& w) {
    check_word(real, w);
    const std::uint64_t span = real.cells(real.depth() - w.length());
    const std::uint64_t lo = w.index() * span;
    const auto f1 = real.grid(1);
    const auto f2 = real.grid(2);
    return {f1[lo + span] - f1[lo], f2[lo + span] - f2[lo]};
}

OscillationTable oscillations(const CascadeRealization& real, int level) {
    if (level < 0 || level > real.depth()) {
        throw DomainError("oscillations: level out of range");
    }
    OscillationTable table;
    table.level = level;
    const std::uint64_t words = real.cells(level);
    const std::uint64_t span = real.cells(real.depth() - level);
    for (int k = 1; k <= 2; ++k) {
        auto& out = k == 1 ? table.o1 : table.o2;
        out.resize(words);
        const auto f = real.grid(k);
        for (std::uint64_t i = 0; i < words; ++i) {
            const auto first = f.begin() + static_cast<std::ptrdiff_t>(i * span);
            const auto [lo, hi] = std::minmax_element(first, first + static_cast<std::ptrdiff_t>(span + 1));
            out[i] = *hi - *lo;
        }
    }
    return table;
}

TiltedSampler::TiltedSampler(const CascadeRealization& real, double q1, double q2, TiltMode mode)
    : real_(&real), mode_(mode) {
    const WeightModel& model = real.model();
    const double ph = phi(model, q1, q2);
    if (!std::isfinite(ph)) {
        throw DivergenceError("Phi(q) is infinite; the tilted weights are not defined");
    }
    const double norm = std::pow(static_cast<double>(model.base()), ph);
    const int n = real.depth();
    tilted_.resize(static_cast<std::size_t>(n) + 1);
    for (int m = 1; m <= n; ++m) {
        auto& level = tilted_[static_cast<std::size_t>(m)];
        level.resize(real.cells(m));
        for (std::uint64_t i = 0; i < level.size(); ++i) {
            level[i] = norm * tilt_factor(node_weight(model, real.seed(), m, i), q1, q2);
        }
    }
    if (mode_ == TiltMode::SubtreeMass) {
        const auto b = static_cast<std::uint64_t>(model.base());
        mass_.resize(static_cast<std::size_t>(n) + 1);
        mass_[static_cast<std::size_t>(n)].assign(real.cells(n), 1.0);
        for (int m = n - 1; m >= 0; --m) {
            auto& level = mass_[static_cast<std::size_t>(m)];
            const auto& child_mass = mass_[static_cast<std::size_t>(m) + 1];
            const auto& child_tilt = tilted_[static_cast<std::size_t>(m) + 1];
            level.resize(real.cells(m));
            for (std::uint64_t i = 0; i < level.size(); ++i) {
                double s = 0.0;
                for (std::uint64_t j = 0; j < b; ++j) {
                    s += child_tilt[i * b + j] * child_mass[i * b + j];
                }
                level[i] = s;
            }
        }
    }
}

std::vector<double> TiltedSampler::child_probabilities(int level, std::uint64_t index) const {
    const int b = real_->base();
    std::vector<double> w(static_cast<std::size_t>(b));
    const auto& tilt = tilted_[static_cast<std::size_t>(level) + 1];
    for (int j = 0; j < b; ++j) {
        const std::uint64_t c = index * static_cast<std::uint64_t>(b) + static_cast<std::uint64_t>(j);
        w[static_cast<std::size_t>(j)] =
            tilt[c] * (mode_ == TiltMode::SubtreeMass ? mass_[static_cast<std::size_t>(level) + 1][c] : 1.0);
    }
    double total = 0.0;
    for (double x : w) {
        total += x;
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw DivergenceError("tilted weights of all children vanish (or overflow)");
    }
    for (double& x : w) {
        x /= total;
    }
    return w;
}

Word TiltedSampler::sample(int target_depth, RandomStream& stream) const {
    if (target_depth < 0 || target_depth > real_->depth()) {
        throw DomainError("target depth exceeds the realization depth");
    }
    const int b = real_->base();
    std::vector<int> digits;
    digits.reserve(static_cast<std::size_t>(target_depth));
    std::vector<double> w(static_cast<std::size_t>(b));
    std::uint64_t index = 0;
    for (int m = 0; m < target_depth; ++m) {
        const auto& tilt = tilted_[static_cast<std::size_t>(m) + 1];
        for (int j = 0; j < b; ++j) {
            const std::uint64_t c = index * static_cast<std::uint64_t>(b) + static_cast<std::uint64_t>(j);
            w[static_cast<std::size_t>(j)] =
                tilt[c] * (mode_ == TiltMode::SubtreeMass ? mass_[static_cast<std::size_t>(m) + 1][c] : 1.0);
        }
        const int d = pick_digit(w.data(), b, stream.uniform());
        digits.push_back(d);
        index = index * static_cast<std::uint64_t>(b) + static_cast<std::uint64_t>(d);
    }
    return Word(b, std::move(digits));
}

Word sample_tilted_path(const CascadeRealization& real, double q1, double q2, int target_depth,
                        RandomStream& stream) {
    if (target_depth < 0 || target_depth > real.depth()) {
        throw DomainError("target depth exceeds the realization depth");
    }
    const WeightModel& model = real.model();
    const double ph = phi(model, q1, q2);
    if (!std::isfinite(ph)) {
        throw DivergenceError("Phi(q) is infinite; the tilted weights are not defined");
    }
    const double norm = std::pow(static_cast<double>(model.base()), ph);
    const int b = model.base();
    std::vector<int> digits;
    std::vector<double> w(static_cast<std::size_t>(b));
    std::uint64_t index = 0;
    for (int m = 0; m < target_depth; ++m) {
        for (int j = 0; j < b; ++j) {
            const std::uint64_t c = index * static_cast<std::uint64_t>(b) + static_cast<std::uint64_t>(j);
            w[static_cast<std::size_t>(j)] = norm * tilt_factor(node_weight(model, real.seed(), m + 1, c), q1, q2);
        }
        const int d = pick_digit(w.data(), b, stream.uniform());
        digits.push_back(d);
        index = index * static_cast<std::uint64_t>(b) + static_cast<std::uint64_t>(d);
    }
    return Word(b, std::move(digits));
}

void export_level_csv(const CascadeRealization& real, int level, std::ostream& out) {
    if (level < 0 || level > real.depth()) {
        throw DomainError("export level out of range");
    }
    const std::uint64_t span = real.cells(real.depth() - level);
    const auto q1 = real.products(level, 1);
    const auto q2 = real.products(level, 2);
    const auto f1 = real.grid(1);
    const auto f2 = real.grid(2);
    out << "word,Q1,Q2,F1_end,F2_end\n";
    char buf[160];
    for (std::uint64_t i = 0; i < real.cells(level); ++i) {
        const std::uint64_t right = (i + 1) * span;
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,%.17g\n", q1[i], q2[i], f1[right], f2[right]);
        out << Word::from_index(real.base(), level, i).to_string() << buf;
    }
}

std::string cache_file_name(const WeightModel& model, std::uint64_t seed, int depth) {
    return model_digest(model) + "_" + std::to_string(seed) + "_" + std::to_string(depth) + ".bin";
}

void save_realization(const CascadeRealization& real, const std::filesystem::path& path) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw ConfigError("cannot write cache file " + tmp);
        }
        const std::string digest = model_digest(real.model());
        const std::uint64_t seed = real.seed();
        const std::int32_t depth = real.depth();
        const std::int32_t base = real.base();
        out.write(kCacheMagic, sizeof kCacheMagic);
        out.write(digest.data(), 16);
        out.write(reinterpret_cast<const char*>(&seed), sizeof seed);
        out.write(reinterpret_cast<const char*>(&depth), sizeof depth);
        out.write(reinterpret_cast<const char*>(&base), sizeof base);
        for (int m = 0; m <= real.depth(); ++m) {
            for (int k = 1; k <= 2; ++k) {
                const auto q = real.products(m, k);
                out.write(reinterpret_cast<const char*>(q.data()),
                          static_cast<std::streamsize>(q.size() * sizeof(double)));
            }
        }
        if (!out) {
            throw ConfigError("failed writing cache file " + tmp);
        }
    }
    std::filesystem::rename(tmp, path);
}

CascadeRealization load_realization(const std::filesystem::path& path, const WeightModel& model) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open cache file " + path.string());
    }
    char magic[8];
    char digest[16];
    std::uint64_t seed = 0;
    std::int32_t depth = 0;
    std::int32_t base = 0;
    in.read(magic, sizeof magic);
    in.read(digest, sizeof digest);
    in.read(reinterpret_cast<char*>(&seed), sizeof seed);
    in.read(reinterpret_cast<char*>(&depth), sizeof depth);
    in.read(reinterpret_cast<char*>(&base), sizeof base);
    if (!in || std::memcmp(magic, kCacheMagic, sizeof magic) != 0) {
        throw ConfigError("not a realization cache file: " + path.string());
    }
    if (std::string(digest, 16) != model_digest(model) || base != model.base() || depth < 1) {
        throw ConfigError("cache file " + path.string() + " was built for a different model");
    }
    CascadeRealization real(model, seed, depth);
    real.products_.resize(static_cast<std::size_t>(depth) + 1);
    for (int m = 0; m <= depth; ++m) {
        for (std::size_t k = 0; k < 2; ++k) {
            auto& q = real.products_[static_cast<std::size_t>(m)][k];
            q.resize(level_size(base, m));
            in.read(reinterpret_cast<char*>(q.data()), static_cast<std::streamsize>(q.size() * sizeof(double)));
        }
    }
    if (!in) {
        throw ConfigError("truncated cache file " + path.string());
    }
    real.fill_grid_and_ranges();
    return real;
}

}  // namespace mcascade
