#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "mcascade/rng.hpp"
#include "mcascade/weights.hpp"
#include "mcascade/words.hpp"

namespace mcascade {

struct BuildOptions {
    /// Refuse to build when b^(depth+1) exceeds this many cells.
    std::uint64_t max_cells = std::uint64_t{1} << 26;
    /// Worker threads for weight generation; 0 = hardware concurrency.
    unsigned threads = 0;
};

/// Default depth cap per base (b=2 -> 18, b=3 -> 12, larger bases scaled
/// to the same cell budget).
int default_depth(int base);

/// A seed-determined depth-n realization of the cascade.
///
/// Level m holds Q_k(w) for all b^m words w of length m as a flat array
/// indexed by the word's integer value. The grid holds F_{k,n}(j b^-n) for
/// j = 0..b^n. For every level, the min and max of each F_{k,n} over the
/// closed interval of each word are precomputed (a range pyramid).
///
/// Immutable once built; safe to share across threads.
class CascadeRealization {
public:
    const WeightModel& model() const noexcept { return model_; }
    std::uint64_t seed() const noexcept { return seed_; }
    int depth() const noexcept { return depth_; }
    int base() const noexcept { return model_.base(); }
    std::uint64_t cells(int level) const;

    /// Q_k over all words of the given level (k = 1, 2).
    std::span<const double> products(int level, int k) const;
    /// F_{k,n} on the b^n + 1 grid points.
    std::span<const double> grid(int k) const;
    /// min / max of F_{k,n} over the closed interval of each level word.
    std::span<const double> range_min(int level, int k) const;
    std::span<const double> range_max(int level, int k) const;

    /// Oscillation O_k of the word with the given level/index.
    double oscillation(int level, std::uint64_t index, int k) const;

private:
    friend CascadeRealization build(const WeightModel&, std::uint64_t, int, const BuildOptions&);
    friend CascadeRealization load_realization(const std::filesystem::path&, const WeightModel&);

    CascadeRealization(WeightModel model, std::uint64_t seed, int depth);
    void fill_grid_and_ranges();

    WeightModel model_;
    std::uint64_t seed_;
    int depth_;
    // products_[level][k-1]
    std::vector<std::array<std::vector<double>, 2>> products_;
    std::array<std::vector<double>, 2> grid_;
    std::vector<std::array<std::vector<double>, 2>> min_;
    std::vector<std::array<std::vector<double>, 2>> max_;
};

/// Build a realization. Node weights come from a counter-based stream keyed
/// by (seed, level, word index), so the result does not depend on
/// traversal order or thread count, and build(seed, n+1) extends
/// build(seed, n). Throws ResourceError over the cell budget and
/// DomainError for depth < 1.
CascadeRealization build(const WeightModel& model, std::uint64_t seed, int depth,
                         const BuildOptions& options = {});

/// W(w) for the word at (level, index), straight from the generator.
WeightDraw node_weight(const WeightModel& model, std::uint64_t seed, int level, std::uint64_t index);

/// (Q1(w), Q2(w)); throws DomainError when |w| exceeds the depth.
std::array<double, 2> partial_product(const CascadeRealization& real, const Word& w);

/// F_{k,n}(pi(w) + b^-|w|) - F_{k,n}(pi(w)) for k = 1, 2.
std::array<double, 2> increment(const CascadeRealization& real, const Word& w);

struct OscillationTable {
    int level = 0;
    std::vector<double> o1;
    std::vector<double> o2;
};

/// O_k(w) for every word of length m, computed by scanning the grid points
/// of each closed interval.
OscillationTable oscillations(const CascadeRealization& real, int level);

enum class TiltMode {
    /// Digit j at node w with probability W~(wj) / sum_j' W~(wj').
    NodeNormalized,
    /// Weight each child additionally by the depth-n tilted mass of its
    /// subtree, i.e. sample exactly from the depth-n tilted measure.
    SubtreeMass,
};

/// Path sampler for the tilted weights W~(w) = b^Phi(q) |W1(w)|^q1 |W2(w)|^q2
/// on one realization. Precomputes the tilted weight of every node.
class TiltedSampler {
public:
    TiltedSampler(const CascadeRealization& real, double q1, double q2,
                  TiltMode mode = TiltMode::NodeNormalized);

    /// A word of length target_depth chosen digit by digit. Throws
    /// DivergenceError when every child of a visited node has zero weight.
    Word sample(int target_depth, RandomStream& stream) const;

    /// Probability of each digit at the node (level, index).
    std::vector<double> child_probabilities(int level, std::uint64_t index) const;

private:
    const CascadeRealization* real_;
    TiltMode mode_;
    // tilted_[level][index] for levels 1..n; mass_ only for SubtreeMass
    std::vector<std::vector<double>> tilted_;
    std::vector<std::vector<double>> mass_;
};

/// One node-normalized tilted path.
Word sample_tilted_path(const CascadeRealization& real, double q1, double q2, int target_depth,
                        RandomStream& stream);

/// CSV rows (word, Q1, Q2, F1_end, F2_end) for all words of a level.
/// F_end is F_{k,n} at the right endpoint of the word's interval.
void export_level_csv(const CascadeRealization& real, int level, std::ostream& out);

/// Cache file name for (model digest, seed, depth).
std::string cache_file_name(const WeightModel& model, std::uint64_t seed, int depth);
void save_realization(const CascadeRealization& real, const std::filesystem::path& path);
/// Load a cached realization; throws ConfigError when the file's key does
/// not match the model.
CascadeRealization load_realization(const std::filesystem::path& path, const WeightModel& model);

}  // namespace mcascade
