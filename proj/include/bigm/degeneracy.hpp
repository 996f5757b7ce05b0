#ifndef BIGM_DEGENERACY_HPP
#define BIGM_DEGENERACY_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bigm/logspace.hpp"
#include "bigm/problem.hpp"

namespace bigm {

// Thrown when a closed-form degeneracy is requested outside its derived range.
struct UnsupportedDegeneracy : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A non-negative count held in log space, with the exact integer alongside
/// whenever it fits 64 bits.
struct CountValue {
    double log_value = kLogZero;
    std::optional<std::uint64_t> exact;

    bool is_zero() const { return is_log_zero(log_value); }

    static CountValue zero() { return {kLogZero, 0}; }
    static CountValue from_u64(std::uint64_t v);
};

/// Number of bitstrings with penalty exactly v for an MNPP instance with
/// `items` numbers and `parts` partitions. Derived range: v <= 7.
CountValue npen_mnpp(std::int64_t items, std::int64_t parts, std::int64_t v);

/// TSP penalization degeneracy for `cities` vertices. Derived range: v <= 7
/// (odd values vanish).
CountValue npen_tsp(std::int64_t cities, std::int64_t v);

/// PO penalization degeneracy for `assets` integers of `bits` binary digits.
/// Non-square v yields zero; squares are derived up to v = 25 with guards
/// (v in {9,16} needs bits >= 2, v = 25 needs bits >= 3).
CountValue npen_po(std::int64_t assets, std::int64_t bits, std::int64_t v);

/// |F| = n_pen(0): P^N, n_v!, C(2^w+N-2, N-1), or brute force for small
/// generic instances.
CountValue feasible_count(const ProblemInstance& inst);

struct DegeneracyTable {
    enum class Source { analytic, brute_force, fitted };

    Source source = Source::brute_force;
    std::int64_t v_cut = 0;
    std::vector<double> log_values;      // index v = 0..v_cut, kLogZero marks zero
    std::vector<std::uint64_t> exact;    // exact counts, brute-force tables only
    bool extrapolated = false;           // fitted values beyond the observed range

    double log_at(std::int64_t v) const { return log_values[static_cast<std::size_t>(v)]; }
    bool zero_at(std::int64_t v) const { return is_log_zero(log_at(v)); }
};

/// Closed-form table for the structured families. Throws
/// UnsupportedDegeneracy when v_cut exceeds the derived range.
DegeneracyTable npen_analytic(const ProblemInstance& inst, std::int64_t v_cut);

/// Exhaustive oracle over all 2^n bitstrings (n capped, see enumeration_cap).
DegeneracyTable npen_bruteforce(const ProblemInstance& inst, std::int64_t v_cut);

/// Sampling estimate: histogram of E^(p) over uniform bitstrings, then a
/// stretched-exponential fit ln n(v) = a + b v^k filled for v = 1..v_cut.
DegeneracyTable npen_fit(const ProblemInstance& inst, std::int64_t samples, std::int64_t v_cut,
                         std::uint64_t seed);

/// Dispatch: analytic when in range, brute force for small n, fit otherwise.
DegeneracyTable degeneracy_for(const ProblemInstance& inst, std::int64_t v_cut,
                               std::uint64_t seed = 0);

struct StretchedExpFit {
    double a = 0.0;
    double b = 0.0;
    double k = 1.0;
    double sse = 0.0;
};

/// Least-squares fit of ln n = a + b v^k over the given points, k constrained
/// to (0, 1.5].
StretchedExpFit fit_stretched_exponential(std::span<const double> vs,
                                          std::span<const double> log_counts);

/// Per-family default v_cut: 4 for MNPP/TSP, 16 for PO, v_max otherwise.
std::int64_t default_v_cut(const ProblemInstance& inst);

} // namespace bigm

#endif // BIGM_DEGENERACY_HPP
