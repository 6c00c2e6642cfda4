#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mcascade/cascade.hpp"
#include "mcascade/rng.hpp"
#include "mcascade/words.hpp"

namespace mcascade {

/// Self-similar Cantor-type set over base b: words made of `generations`
/// blocks of `block_length` digits, each block drawn from `blocks` (block
/// values are base-b integers below b^block_length). Its Hausdorff and
/// packing dimensions are both log(m) / log(b^block_length), m = |blocks|.
class TestSet {
public:
    TestSet(int base, int block_length, std::vector<std::uint64_t> blocks, int generations);

    int base() const noexcept { return base_; }
    int block_length() const noexcept { return block_length_; }
    int generations() const noexcept { return generations_; }
    /// Word length of the surviving intervals.
    int depth() const noexcept { return block_length_ * generations_; }
    const std::vector<std::uint64_t>& blocks() const noexcept { return blocks_; }
    double dimension() const noexcept { return dimension_; }

    /// Whether the interval of the word (level, index) meets the limit set,
    /// i.e. every complete or partial block of the word is allowed. Not
    /// limited to depth(), which only sizes words().
    bool meets(int level, std::uint64_t index) const;

    /// Sorted integer values of the surviving words of length depth().
    std::vector<std::uint64_t> words() const;
    std::uint64_t size() const;

private:
    int base_;
    int block_length_;
    std::vector<std::uint64_t> blocks_;
    int generations_;
    double dimension_;
    std::uint64_t block_span_;
    // valid_prefix_[t][p]: some block starts with the t-digit prefix p
    std::vector<std::vector<bool>> valid_prefix_;
};

/// Digits-only Cantor set: keep the digits in `keep` at every level.
TestSet cantor_set(int base, const std::vector<int>& keep, int depth);

struct DimensionEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::pair<int, int> scale_range{0, 0};  // regression window
    double r_squared = 1.0;
    /// (scale, count) for every computed scale, including the ones outside
    /// the regression window.
    std::vector<std::pair<int, double>> counts;
    /// Set when the estimate refers to an empty set (value 0 by convention).
    bool empty = false;
};

struct BoxCountOptions {
    /// Cover boxes stopped below level n - extra_levels count as
    /// unresolved; with 1 these are the boxes that hit the leaves.
    int extra_levels = 1;
    /// Coarsest dyadic scale 2^-j computed.
    int j_first = 2;
    /// Coarsest scales dropped from the regression.
    int drop_coarse = 2;
    /// A scale is resolvable while at most this fraction of its cover boxes
    /// is unresolved. Calibrated on lognormal models, whose stopping levels
    /// spread over many generations.
    double unresolved_fraction = 0.2;
    /// Explicit regression window; overrides the guard when set.
    std::optional<std::pair<int, int>> scales;
    int j_cap = 30;
};

/// Box-counting dimension of F(K) from a stopping-time cover: each node of
/// K's tree is refined until the bounding box of F over its interval fits
/// in a dyadic square of the finest resolvable scale; coarser counts are
/// the distinct parents of the finest squares.
DimensionEstimate image_box_dim(const CascadeRealization& real, const TestSet& k,
                                const BoxCountOptions& options = {});

/// Scaling exponent of S_m = sum_{|w|=m} O1(w)^q1 O2(w)^q2: slope of log_b S_m
/// against m over [m_lo, m_hi]. Expected 1 - Phi(q).
DimensionEstimate partition_function(const CascadeRealization& real, double q1, double q2, int m_lo,
                                     int m_hi);

/// log_b of the mean of O1^q1 O2^q2 over the words of one level.
double log_mean_oscillation_moment(const CascadeRealization& real, double q1, double q2, int level);

/// Hoelder vector estimate at a point: minus the slope of log_b O_k(w|_m)
/// against m over [n1, n2].
std::array<double, 2> holder_exponent(const CascadeRealization& real, const Word& w, int n1, int n2);
std::array<double, 2> holder_exponent(const CascadeRealization& real, double x, int n1, int n2);

struct LevelSetOptions {
    /// Counting window for the dimension fit; m_hi <= depth - 4.
    int m_lo = 3;
    int m_hi = -1;  // -1: depth - 4
};

struct LevelSet {
    int level = 0;
    std::vector<Word> words;  // intervals at `level` whose F_k range brackets y
    DimensionEstimate dimension;
};

/// Crossing intervals of the level set {F_k = y}.
LevelSet level_set(const CascadeRealization& real, int k, double y, int level,
                   const LevelSetOptions& options = {});

/// Number of words at a level whose closed-interval range of F_k brackets y.
std::uint64_t level_crossings(const CascadeRealization& real, int k, double y, int level);

struct OccupationHistogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> mass;

    double bin_width() const { return mass.empty() ? 0.0 : (hi - lo) / static_cast<double>(mass.size()); }
    /// A level y: bin chosen with probability equal to its mass, then
    /// uniform inside the bin.
    double sample(RandomStream& stream) const;
};

/// Fraction of depth-n cells whose left-endpoint value of F_k falls in each
/// of `bins` equal bins over [min F_k, max F_k].
OccupationHistogram occupation_histogram(const CascadeRealization& real, int k, int bins);

struct SweepRow {
    double xi0 = 0.0;
    DimensionEstimate estimate;
    double prediction = 0.0;  // xi0 / alpha
};

/// Image dimension of several sets on one realization. Fractional models
/// with equal exponents and non-identical weights only.
std::vector<SweepRow> uniform_sweep(const CascadeRealization& real, const std::vector<TestSet>& sets,
                                    const BoxCountOptions& options = {});

}  // namespace mcascade
