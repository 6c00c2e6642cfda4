#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mcascade {

/// b^n as an unsigned 64-bit integer; throws DomainError on overflow.
std::uint64_t checked_pow(std::uint64_t base, int exponent);

/// A finite word over the alphabet {0, ..., b-1}. The empty word is valid.
class Word {
public:
    Word() = default;
    explicit Word(int base);
    Word(int base, std::vector<int> digits);

    /// Word of the given length whose base-b integer value is `index`
    /// (most significant digit first).
    static Word from_index(int base, int length, std::uint64_t index);
    /// Parse a digit string ("0121"); digits above 9 use lowercase letters.
    static Word parse(int base, std::string_view text);

    int base() const noexcept { return base_; }
    int length() const noexcept { return static_cast<int>(digits_.size()); }
    bool empty() const noexcept { return digits_.empty(); }
    int operator[](int i) const { return digits_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& digits() const noexcept { return digits_; }

    /// Base-b integer value of the digit string; this is the flat-array
    /// index of the word within its level.
    std::uint64_t index() const;

    /// w|_m, the first m digits.
    Word prefix(int m) const;
    /// w·j
    Word child(int digit) const;

    std::string to_string() const;

    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word&, const Word&) = default;

private:
    int base_ = 2;
    std::vector<int> digits_;
};

__extension__ using u128 = unsigned __int128;

/// Non-negative rational num/den with den a power of the base.
struct BadicRational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const BadicRational& a, const BadicRational& b) noexcept {
        return static_cast<u128>(a.num) * b.den ==
               static_cast<u128>(b.num) * a.den;
    }
    friend std::strong_ordering operator<=>(const BadicRational& a, const BadicRational& b) noexcept {
        return static_cast<u128>(a.num) * b.den <=>
               static_cast<u128>(b.num) * a.den;
    }
};

BadicRational operator+(const BadicRational& a, const BadicRational& b);

/// The half-open interval I_w = [left, left + length).
struct BadicInterval {
    Word word;
    BadicRational left;
    BadicRational length;

    BadicRational right() const { return left + length; }
    bool contains(double x) const;
};

/// x|_n: the depth-n word whose interval contains x. x = 1 maps to the
/// all-(b-1) word. Throws DomainError for x outside [0, 1].
Word word_of(double x, int n, int base);
/// Exact variant for b-adic rationals in [0, 1].
Word word_of(const BadicRational& x, int n, int base);

BadicInterval interval_of(const Word& w);

/// π(w), the left endpoint.
BadicRational project(const Word& w);

/// The same-length word w+ with π(w+) = π(w) + b^-|w|, or nothing when w
/// is the all-(b-1) word.
std::optional<Word> successor(const Word& w);

}  // namespace mcascade
