#ifndef BIGM_LOGSPACE_HPP
#define BIGM_LOGSPACE_HPP

#include <cmath>
#include <limits>
#include <span>

namespace bigm {

// Sentinel for ln(0). All count-like quantities in this library live in log
// space because P^N and n_v! overflow 64-bit integers at benchmark sizes.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

inline bool is_log_zero(double x) { return std::isinf(x) && x < 0; }

/// ln(e^a + e^b), safe against under/overflow and ln(0) operands.
inline double log_add(double a, double b) {
    if (is_log_zero(a)) return b;
    if (is_log_zero(b)) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

/// ln(sum_i e^{x_i}) with a max shift; returns kLogZero for an empty or
/// all-zero input.
inline double log_sum_exp(std::span<const double> xs) {
    double max_arg = kLogZero;
    for (double x : xs) {
        if (x > max_arg) max_arg = x;
    }
    if (is_log_zero(max_arg)) return kLogZero;
    double sum = 0.0;
    for (double x : xs) {
        if (!is_log_zero(x)) sum += std::exp(x - max_arg);
    }
    return max_arg + std::log(sum);
}

} // namespace bigm

#endif // BIGM_LOGSPACE_HPP
