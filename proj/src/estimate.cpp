#include "mcascade/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcascade/errors.hpp"
#include "mcascade/fit.hpp"

namespace mcascade {

namespace {

using Square = std::pair<std::int64_t, std::int64_t>;

double log_base(double x, double b) { return std::log(x) / std::log(b); }

struct Cover {
    std::vector<Square> squares;  // sorted, unique
    std::uint64_t boxes = 0;
    std::uint64_t deep_boxes = 0;  // boxes stopped below the covering level
};

// Stopping-time cover of F(K) at scale 2^-j: descend K's tree until the
// bounding box of a node fits in one square side (or the leaves are hit),
// then rasterize each box with the half-open convention.
Cover cover_at(const CascadeRealization& real, const TestSet& k, int j, int cover_level) {
    const int n = real.depth();
    const auto b = static_cast<std::uint64_t>(real.base());
    const double side = std::ldexp(1.0, -j);
    Cover cover;
    std::vector<std::pair<int, std::uint64_t>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [m, i] = stack.back();
        stack.pop_back();
        const double x0 = real.range_min(m, 1)[i];
        const double x1 = real.range_max(m, 1)[i];
        const double y0 = real.range_min(m, 2)[i];
        const double y1 = real.range_max(m, 2)[i];
        if (std::max(x1 - x0, y1 - y0) <= side || m == n) {
            ++cover.boxes;
            if (m > cover_level) {
                ++cover.deep_boxes;
            }
            const auto ix0 = static_cast<std::int64_t>(std::floor(std::ldexp(x0, j)));
            const auto ix1 = std::max(ix0, static_cast<std::int64_t>(std::ceil(std::ldexp(x1, j))) - 1);
            const auto iy0 = static_cast<std::int64_t>(std::floor(std::ldexp(y0, j)));
            const auto iy1 = std::max(iy0, static_cast<std::int64_t>(std::ceil(std::ldexp(y1, j))) - 1);
            for (auto ix = ix0; ix <= ix1; ++ix) {
                for (auto iy = iy0; iy <= iy1; ++iy) {
                    cover.squares.emplace_back(ix, iy);
                }
            }
            continue;
        }
        for (std::uint64_t d = b; d-- > 0;) {
            const std::uint64_t c = i * b + d;
            if (k.meets(m + 1, c)) {
                stack.emplace_back(m + 1, c);
            }
        }
    }
    std::sort(cover.squares.begin(), cover.squares.end());
    cover.squares.erase(std::unique(cover.squares.begin(), cover.squares.end()), cover.squares.end());
    return cover;
}

DimensionEstimate regress(std::vector<std::pair<int, double>> counts, int lo, int hi, double log_of) {
    DimensionEstimate est;
    est.counts = std::move(counts);
    std::vector<double> x, y;
    for (const auto& [s, c] : est.counts) {
        if (s >= lo && s <= hi) {
            x.push_back(s);
            y.push_back(log_base(c, log_of));
        }
    }
    const LineFit fit = fit_line(x, y);
    est.value = fit.slope;
    est.stderr_ = fit.slope_stderr;
    est.r_squared = fit.r_squared;
    est.scale_range = {lo, hi};
    return est;
}

}  // namespace

TestSet::TestSet(int base, int block_length, std::vector<std::uint64_t> blocks, int generations)
    : base_(base), block_length_(block_length), blocks_(std::move(blocks)), generations_(generations) {
    if (base < 2 || base > 36) {
        throw DomainError("base must be in [2, 36]");
    }
    if (block_length < 1 || generations < 0) {
        throw DomainError("block length must be >= 1 and generations >= 0");
    }
    if (blocks_.empty()) {
        throw DomainError("empty-digit-set: a test set needs at least one block");
    }
    block_span_ = checked_pow(static_cast<std::uint64_t>(base), block_length);
    std::sort(blocks_.begin(), blocks_.end());
    blocks_.erase(std::unique(blocks_.begin(), blocks_.end()), blocks_.end());
    if (blocks_.back() >= block_span_) {
        throw DomainError("block value exceeds b^block_length - 1");
    }
    dimension_ = std::log(static_cast<double>(blocks_.size())) / std::log(static_cast<double>(block_span_));
    valid_prefix_.resize(static_cast<std::size_t>(block_length) + 1);
    for (int t = 0; t <= block_length; ++t) {
        const std::uint64_t span = checked_pow(static_cast<std::uint64_t>(base), t);
        const std::uint64_t rest = checked_pow(static_cast<std::uint64_t>(base), block_length - t);
        auto& v = valid_prefix_[static_cast<std::size_t>(t)];
        v.assign(span, false);
        for (std::uint64_t blk : blocks_) {
            v[blk / rest] = true;
        }
    }
    if (static_cast<double>(size()) > std::ldexp(1.0, 26)) {
        throw ResourceError("test set has more than 2^26 intervals");
    }
}

bool TestSet::meets(int level, std::uint64_t index) const {
    const auto b = static_cast<std::uint64_t>(base_);
    const int full = level / block_length_;
    const int partial = level % block_length_;
    const std::uint64_t pspan = checked_pow(b, partial);
    if (!valid_prefix_[static_cast<std::size_t>(partial)][index % pspan]) {
        return false;
    }
    index /= pspan;
    const auto& members = valid_prefix_[static_cast<std::size_t>(block_length_)];
    for (int g = 0; g < full; ++g) {
        if (!members[index % block_span_]) {
            return false;
        }
        index /= block_span_;
    }
    return true;
}

std::uint64_t TestSet::size() const {
    return checked_pow(blocks_.size(), generations_);
}

std::vector<std::uint64_t> TestSet::words() const {
    std::vector<std::uint64_t> out{0};
    for (int g = 0; g < generations_; ++g) {
        std::vector<std::uint64_t> next;
        next.reserve(out.size() * blocks_.size());
        for (std::uint64_t w : out) {
            for (std::uint64_t blk : blocks_) {
                next.push_back(w * block_span_ + blk);
            }
        }
        out = std::move(next);
    }
    return out;
}

TestSet cantor_set(int base, const std::vector<int>& keep, int depth) {
    std::vector<std::uint64_t> blocks;
    for (int d : keep) {
        if (d < 0 || d >= base) {
            throw DomainError("kept digit outside the alphabet");
        }
        blocks.push_back(static_cast<std::uint64_t>(d));
    }
    return TestSet(base, 1, std::move(blocks), depth);
}

DimensionEstimate image_box_dim(const CascadeRealization& real, const TestSet& k,
                                const BoxCountOptions& options) {
    const int n = real.depth();
    const int cover_level = n - options.extra_levels;
    if (k.base() != real.base()) {
        throw DomainError("test set base differs from the model base");
    }
    if (cover_level < 1) {
        throw DomainError("depth must exceed " + std::to_string(options.extra_levels));
    }
    int lo = options.j_first + options.drop_coarse;
    int finest = 0;
    Cover cover;
    if (options.scales) {
        lo = options.scales->first;
        finest = options.scales->second;
        if (finest > options.j_cap || lo < options.j_first) {
            throw DomainError("scale window outside [j_first, j_cap]");
        }
        cover = cover_at(real, k, finest, cover_level);
    } else {
        // Resolvability guard: the finest scale whose cover has at most the
        // allowed fraction of boxes stopped below the covering level.
        for (int j = options.j_first; j <= options.j_cap; ++j) {
            Cover c = cover_at(real, k, j, cover_level);
            if (static_cast<double>(c.deep_boxes) > options.unresolved_fraction * static_cast<double>(c.boxes)) {
                break;
            }
            finest = j;
            cover = std::move(c);
        }
    }
    if (finest - lo + 1 < 4) {
        throw DegenerateRangeError("only " + std::to_string(std::max(0, finest - lo + 1)) +
                                   " resolvable scales (need 4)");
    }
    std::vector<std::pair<int, double>> counts;
    std::vector<Square> squares = std::move(cover.squares);
    for (int j = finest; j >= options.j_first; --j) {
        counts.emplace_back(j, static_cast<double>(squares.size()));
        for (auto& s : squares) {
            s = {s.first >> 1, s.second >> 1};
        }
        std::sort(squares.begin(), squares.end());
        squares.erase(std::unique(squares.begin(), squares.end()), squares.end());
    }
    std::reverse(counts.begin(), counts.end());
    return regress(std::move(counts), lo, finest, 2.0);
}

double log_mean_oscillation_moment(const CascadeRealization& real, double q1, double q2, int level) {
    if (level < 0 || level > real.depth()) {
        throw DomainError("level out of range");
    }
    const auto term = [](double o, double q) {
        if (q == 0.0) {
            return 1.0;
        }
        if (o == 0.0 && q < 0.0) {
            throw ZeroOscillationError("zero oscillation under a negative exponent");
        }
        return std::pow(o, q);
    };
    const auto lo1 = real.range_min(level, 1);
    const auto hi1 = real.range_max(level, 1);
    const auto lo2 = real.range_min(level, 2);
    const auto hi2 = real.range_max(level, 2);
    double s = 0.0;
    for (std::size_t i = 0; i < lo1.size(); ++i) {
        s += term(hi1[i] - lo1[i], q1) * term(hi2[i] - lo2[i], q2);
    }
    return log_base(s / static_cast<double>(lo1.size()), real.base());
}

DimensionEstimate partition_function(const CascadeRealization& real, double q1, double q2, int m_lo,
                                     int m_hi) {
    if (m_lo < 0 || m_hi > real.depth() || m_hi - m_lo < 1) {
        throw DomainError("partition levels must satisfy 0 <= m_lo < m_hi <= depth");
    }
    std::vector<std::pair<int, double>> sums;
    for (int m = m_lo; m <= m_hi; ++m) {
        // S_m = b^m * mean
        sums.emplace_back(m, std::pow(static_cast<double>(real.base()),
                                      m + log_mean_oscillation_moment(real, q1, q2, m)));
    }
    return regress(std::move(sums), m_lo, m_hi, real.base());
}

std::array<double, 2> holder_exponent(const CascadeRealization& real, const Word& w, int n1, int n2) {
    if (n1 < 0 || n2 <= n1 || n2 > real.depth()) {
        throw DomainError("Hoelder window must satisfy 0 <= n1 < n2 <= depth");
    }
    if (w.length() < n2) {
        throw DomainError("word shorter than the Hoelder window");
    }
    std::array<double, 2> h{};
    for (int k = 1; k <= 2; ++k) {
        std::vector<double> x, y;
        for (int m = n1; m <= n2; ++m) {
            const double o = real.oscillation(m, w.prefix(m).index(), k);
            if (!(o > 0.0)) {
                throw ZeroOscillationError("zero oscillation along the path");
            }
            x.push_back(m);
            y.push_back(log_base(o, real.base()));
        }
        h[static_cast<std::size_t>(k - 1)] = -fit_line(x, y).slope;
    }
    return h;
}

std::array<double, 2> holder_exponent(const CascadeRealization& real, double x, int n1, int n2) {
    return holder_exponent(real, word_of(x, n2, real.base()), n1, n2);
}

std::uint64_t level_crossings(const CascadeRealization& real, int k, double y, int level) {
    const auto lo = real.range_min(level, k);
    const auto hi = real.range_max(level, k);
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (lo[i] <= y && y <= hi[i]) {
            ++c;
        }
    }
    return c;
}

LevelSet level_set(const CascadeRealization& real, int k, double y, int level, const LevelSetOptions& options) {
    const int n = real.depth();
    const int m_hi = options.m_hi < 0 ? n - 4 : options.m_hi;
    if (level < 0 || level > n - 4) {
        throw DomainError("level-set level must be <= depth - 4");
    }
    if (k != 1 && k != 2) {
        throw DomainError("coordinate index must be 1 or 2");
    }
    if (options.m_lo < 0 || m_hi > n - 4 || m_hi - options.m_lo < 1) {
        throw DomainError("level-set window must satisfy 0 <= m_lo < m_hi <= depth - 4");
    }
    LevelSet out;
    out.level = level;
    const auto lo = real.range_min(level, k);
    const auto hi = real.range_max(level, k);
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (lo[i] <= y && y <= hi[i]) {
            out.words.push_back(Word::from_index(real.base(), level, i));
        }
    }
    if (level_crossings(real, k, y, 0) == 0) {
        out.dimension.empty = true;
        out.dimension.scale_range = {options.m_lo, m_hi};
        return out;
    }
    std::vector<std::pair<int, double>> counts;
    for (int m = options.m_lo; m <= m_hi; ++m) {
        counts.emplace_back(m, static_cast<double>(level_crossings(real, k, y, m)));
    }
    out.dimension = regress(std::move(counts), options.m_lo, m_hi, real.base());
    return out;
}

double OccupationHistogram::sample(RandomStream& stream) const {
    const double u = stream.uniform();
    double acc = 0.0;
    std::size_t bin = mass.size() - 1;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        acc += mass[i];
        if (u < acc) {
            bin = i;
            break;
        }
    }
    while (bin > 0 && mass[bin] == 0.0) {
        --bin;
    }
    return lo + (static_cast<double>(bin) + stream.uniform()) * bin_width();
}

OccupationHistogram occupation_histogram(const CascadeRealization& real, int k, int bins) {
    if (bins < 8) {
        throw DomainError("occupation histogram needs at least 8 bins");
    }
    const auto f = real.grid(k);
    OccupationHistogram h;
    const auto [mn, mx] = std::minmax_element(f.begin(), f.end());
    h.lo = *mn;
    h.hi = *mx;
    h.mass.assign(static_cast<std::size_t>(bins), 0.0);
    const std::size_t cells = f.size() - 1;
    const double width = h.hi - h.lo;
    for (std::size_t j = 0; j < cells; ++j) {
        std::size_t bin = 0;
        if (width > 0.0) {
            bin = std::min(static_cast<std::size_t>((f[j] - h.lo) / width * bins), static_cast<std::size_t>(bins) - 1);
        }
        h.mass[bin] += 1.0;
    }
    for (double& m : h.mass) {
        m /= static_cast<double>(cells);
    }
    return h;
}

std::vector<SweepRow> uniform_sweep(const CascadeRealization& real, const std::vector<TestSet>& sets,
                                    const BoxCountOptions& options) {
    const auto* f = std::get_if<Fractional>(&real.model().kind());
    if (f == nullptr || f->alpha1 != f->alpha2 || real.model().identical_weights()) {
        throw ScopeError("uniform sweep needs a fractional model with alpha1 = alpha2 and P(W1 = W2) < 1");
    }
    std::vector<SweepRow> rows;
    for (const TestSet& k : sets) {
        SweepRow row;
        row.xi0 = k.dimension();
        row.prediction = k.dimension() / f->alpha1;
        row.estimate = image_box_dim(real, k, options);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace mcascade
