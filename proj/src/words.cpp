#include "mcascade/words.hpp"

#include <cmath>
#include <numeric>

#include "mcascade/errors.hpp"

namespace mcascade {

namespace {

void check_base(int base) {
    if (base < 2 || base > 36) {
        throw DomainError("base must be in [2, 36], got " + std::to_string(base));
    }
}

char digit_char(int d) {
    return d < 10 ? static_cast<char>('0' + d) : static_cast<char>('a' + d - 10);
}

}  // namespace

std::uint64_t checked_pow(std::uint64_t base, int exponent) {
    if (exponent < 0) {
        throw DomainError("negative exponent in checked_pow");
    }
    std::uint64_t r = 1;
    for (int i = 0; i < exponent; ++i) {
        if (r > UINT64_MAX / base) {
            throw DomainError("b^n overflows 64 bits (b=" + std::to_string(base) +
                              ", n=" + std::to_string(exponent) + ")");
        }
        r *= base;
    }
    return r;
}

Word::Word(int base) : base_(base) { check_base(base); }

Word::Word(int base, std::vector<int> digits) : base_(base), digits_(std::move(digits)) {
    check_base(base);
    for (int d : digits_) {
        if (d < 0 || d >= base) {
            throw DomainError("digit " + std::to_string(d) + " outside [0, " +
                              std::to_string(base - 1) + "]");
        }
    }
}

Word Word::from_index(int base, int length, std::uint64_t index) {
    check_base(base);
    if (length < 0) {
        throw DomainError("negative word length");
    }
    if (length < 64 && index >= checked_pow(static_cast<std::uint64_t>(base), length)) {
        throw DomainError("word index out of range for its level");
    }
    std::vector<int> digits(static_cast<std::size_t>(length));
    for (int i = length - 1; i >= 0; --i) {
        digits[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::uint64_t>(base));
        index /= static_cast<std::uint64_t>(base);
    }
    return Word(base, std::move(digits));
}

Word Word::parse(int base, std::string_view text) {
    std::vector<int> digits;
    digits.reserve(text.size());
    for (char c : text) {
        int d = -1;
        if (c >= '0' && c <= '9') {
            d = c - '0';
        } else if (c >= 'a' && c <= 'z') {
            d = c - 'a' + 10;
        }
        if (d < 0) {
            throw DomainError(std::string("invalid digit character '") + c + "'");
        }
        digits.push_back(d);
    }
    return Word(base, std::move(digits));
}

std::uint64_t Word::index() const {
    std::uint64_t r = 0;
    const auto b = static_cast<std::uint64_t>(base_);
    for (int d : digits_) {
        if (r > (UINT64_MAX - static_cast<std::uint64_t>(d)) / b) {
            throw DomainError("word index overflows 64 bits");
        }
        r = r * b + static_cast<std::uint64_t>(d);
    }
    return r;
}

Word Word::prefix(int m) const {
    if (m < 0 || m > length()) {
        throw DomainError("prefix length out of range");
    }
    return Word(base_, std::vector<int>(digits_.begin(), digits_.begin() + m));
}

Word Word::child(int digit) const {
    auto d = digits_;
    d.push_back(digit);
    return Word(base_, std::move(d));
}

std::string Word::to_string() const {
    std::string s;
    s.reserve(digits_.size());
    for (int d : digits_) {
        s.push_back(digit_char(d));
    }
    return s;
}

BadicRational operator+(const BadicRational& a, const BadicRational& b) {
    const std::uint64_t den = std::lcm(a.den, b.den);
    return {a.num * (den / a.den) + b.num * (den / b.den), den};
}

bool BadicInterval::contains(double x) const {
    // Compare through the exact classifier so boundary points follow the
    // half-open convention.
    if (x < 0.0 || x >= 1.0) {
        return false;
    }
    return word_of(x, word.length(), word.base()) == word;
}

Word word_of(double x, int n, int base) {
    check_base(base);
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("word_of: x must lie in [0, 1]");
    }
    if (n < 0) {
        throw DomainError("word_of: negative depth");
    }
    const std::uint64_t cells = checked_pow(static_cast<std::uint64_t>(base), n);
    if (x == 1.0) {
        return Word::from_index(base, n, cells - 1);
    }
    if (x == 0.0) {
        return Word::from_index(base, n, 0);
    }
    // x = mant * 2^exp exactly with mant < 2^53; floor(x * b^n) is then an
    // exact integer shift.
    int exp2 = 0;
    const double frac = std::frexp(x, &exp2);
    const auto mant = static_cast<std::uint64_t>(std::ldexp(frac, 53));
    const int shift = 53 - exp2;
    const u128 scaled = static_cast<u128>(mant) * cells;
    const std::uint64_t idx = shift >= 128 ? 0 : static_cast<std::uint64_t>(scaled >> shift);
    return Word::from_index(base, n, idx);
}

Word word_of(const BadicRational& x, int n, int base) {
    check_base(base);
    if (x.den == 0 || x.num > x.den) {
        throw DomainError("word_of: x must lie in [0, 1]");
    }
    const std::uint64_t cells = checked_pow(static_cast<std::uint64_t>(base), n);
    if (x.num == x.den) {
        return Word::from_index(base, n, cells - 1);
    }
    const u128 scaled = static_cast<u128>(x.num) * cells;
    return Word::from_index(base, n, static_cast<std::uint64_t>(scaled / x.den));
}

BadicRational project(const Word& w) {
    return {w.index(), checked_pow(static_cast<std::uint64_t>(w.base()), w.length())};
}

BadicInterval interval_of(const Word& w) {
    const BadicRational left = project(w);
    return {w, left, {1, left.den}};
}

std::optional<Word> successor(const Word& w) {
    auto digits = w.digits();
    for (int i = w.length() - 1; i >= 0; --i) {
        auto& d = digits[static_cast<std::size_t>(i)];
        if (d + 1 < w.base()) {
            ++d;
            return Word(w.base(), std::move(digits));
        }
        d = 0;
    }
    return std::nullopt;
}

}  // namespace mcascade
