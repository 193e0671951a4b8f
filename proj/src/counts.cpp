#include "bootperc/counts.hpp"

#include <stdexcept>

namespace bootperc {

Count checked_add(Count a, Count b) {
    Count out = 0;
    if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("count addition overflow");
    return out;
}

Count checked_mul(Count a, Count b) {
    Count out = 0;
    if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("count multiplication overflow");
    return out;
}

Count checked_pow(Count base, unsigned exp) {
    Count out = 1;
    for (unsigned i = 0; i < exp; ++i) out = checked_mul(out, base);
    return out;
}

Count binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 out = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // out * (n-k+i) is divisible by i at every step; the 128-bit
        // intermediate keeps results that fit in 64 bits exact.
        out = out * (n - k + i) / i;
        if (out > static_cast<unsigned __int128>(~0ULL))
            throw std::overflow_error("binomial overflow");
    }
    return static_cast<Count>(out);
}

static std::int64_t checked_add_i64(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("signed addition overflow");
    return out;
}

std::int64_t binomial_signed(std::int64_t n, std::int64_t k) {
    if (k < 0) return 0;
    if (n >= 0) {
        if (k > n) return 0;
        return static_cast<std::int64_t>(binomial(static_cast<std::uint64_t>(n),
                                                  static_cast<std::uint64_t>(k)));
    }
    // binom(n, k) = (-1)^k binom(k - n - 1, k) for n < 0.
    const std::int64_t flipped =
        static_cast<std::int64_t>(binomial(static_cast<std::uint64_t>(k - n - 1),
                                           static_cast<std::uint64_t>(k)));
    return (k % 2 == 0) ? flipped : -flipped;
}

Count iterated_binom_sum(int levels, int top, int limit) {
    if (levels < 0) throw std::invalid_argument("iterated_binom_sum: negative level count");
    if (top < 0) throw std::invalid_argument("iterated_binom_sum: negative top");
    if (limit < 0) return 0;
    if (levels == 0)
        return binomial(static_cast<std::uint64_t>(top), static_cast<std::uint64_t>(limit));
    Count total = 0;
    for (int i = 0; i <= limit; ++i) total = checked_add(total, iterated_binom_sum(levels - 1, top, i));
    return total;
}

std::int64_t iterated_binom_sum_signed(int levels, std::int64_t top, int limit) {
    if (levels < 0) throw std::invalid_argument("iterated_binom_sum_signed: negative level count");
    if (limit < 0) return 0;
    if (levels == 0) return binomial_signed(top, limit);
    std::int64_t total = 0;
    for (int i = 0; i <= limit; ++i)
        total = checked_add_i64(total, iterated_binom_sum_signed(levels - 1, top, i));
    return total;
}

static void validate_threshold(int d, int r) {
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    if (r < 2 || r > 2 * d) throw std::invalid_argument("threshold must satisfy 2 <= r <= 2d");
}

Count min_protecting_count(int d, int r, int t) {
    validate_threshold(d, r);
    if (t < 0) throw std::invalid_argument("time must be >= 0");
    if (r <= d) return iterated_binom_sum(d - r + 2, d, t);
    const int layers = 2 * d - r + 1;
    if (t > layers)
        throw std::invalid_argument("subcritical regime rejects t > 2d-r+1");
    Count total = 0;
    for (int k = 0; k <= t; ++k)
        total = checked_add(total, binomial(static_cast<std::uint64_t>(layers),
                                            static_cast<std::uint64_t>(k)));
    return total;
}

Count sphere_protecting_count(int d, int r, int t) {
    validate_threshold(d, r);
    if (r > d) throw std::invalid_argument("sphere_protecting_count needs 2 <= r <= d");
    if (t < 0) throw std::invalid_argument("time must be >= 0");
    return iterated_binom_sum(d - r + 1, d, t);
}

Count min_protecting_count_modified(int d, int r, int t) {
    validate_threshold(d, r);
    if (r > d) throw std::invalid_argument("modified rule needs 2 <= r <= d");
    if (t < 0) throw std::invalid_argument("time must be >= 0");
    const int dims = d - r + 1;
    Count total = 0;
    for (int i0 = 0; i0 <= dims; ++i0) {
        if (t - i0 < 0) continue;
        Count inner = 1;  // the ball of radius t-i0 in `dims` nested indices, all-ones summand
        if (dims > 0) {
            // sum over chains i_1 >= ... >= i_dims in [0, t-i0] equals binom(t-i0+dims, dims)
            inner = binomial(static_cast<std::uint64_t>(t - i0 + dims),
                             static_cast<std::uint64_t>(dims));
        }
        total = checked_add(total, checked_mul(binomial(static_cast<std::uint64_t>(dims),
                                                        static_cast<std::uint64_t>(i0)),
                                               inner));
    }
    return total;
}

Count extremal_set_count(int d, int r) {
    validate_threshold(d, r);
    if (r > d) throw std::invalid_argument("extremal_set_count needs 2 <= r <= d");
    const unsigned a = static_cast<unsigned>(d - r + 1);
    Count out = binomial(static_cast<std::uint64_t>(d), a);
    out = checked_mul(out, checked_pow(2, static_cast<unsigned>(r - 1)));
    out = checked_mul(out, checked_pow(static_cast<Count>(d), 2 * a));
    return out;
}

Count extremal_set_count_modified(int d, int r) {
    validate_threshold(d, r);
    if (r > d) throw std::invalid_argument("extremal_set_count_modified needs 2 <= r <= d");
    return binomial(static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(d - r + 1));
}

IdentityCheck identity_mini(int d, int r, int f, int k) {
    if (r < 2 || d < r) throw std::invalid_argument("identity_mini needs d >= r >= 2");
    if (f < 0 || k < 0) throw std::invalid_argument("identity_mini needs f, k >= 0");
    const int levels = d - r + 1;
    IdentityCheck out;
    out.lhs = iterated_binom_sum_signed(levels, f, k);
    out.rhs = checked_add_i64(2 * iterated_binom_sum_signed(levels, f - 1, k - 1),
                              iterated_binom_sum_signed(levels - 1, f - 1, k));
    out.equal = out.lhs == out.rhs;
    return out;
}

IdentityCheck identity_mega(int d, int r, int f, int k) {
    if (r < 2 || d <= r) throw std::invalid_argument("identity_mega needs d > r >= 2");
    if (f < 0 || f > d || k < 0) throw std::invalid_argument("identity_mega needs 0 <= f <= d, k >= 0");
    const int levels = d - r + 1;
    IdentityCheck out;
    out.lhs = iterated_binom_sum_signed(levels, f, k);
    std::int64_t rhs = 0;
    for (int j = 1; j <= levels; ++j)
        rhs = checked_add_i64(rhs, 2 * iterated_binom_sum_signed(levels - j + 1, f - j, k - 1));
    rhs = checked_add_i64(rhs, binomial_signed(f - levels, k));
    out.rhs = rhs;
    out.equal = out.lhs == out.rhs;
    return out;
}

}  // namespace bootperc
