#ifndef BIGM_SPECTRAL_HPP
#define BIGM_SPECTRAL_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "bigm/logspace.hpp"
#include "bigm/problem.hpp"
#include "bigm/rng.hpp"

namespace bigm {

// Thrown when a sampled feasible energy lands below the supplied lower bound.
struct InvalidLowerBound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Estimated feasible spectral weights n_Delta(e + E_LB) on the lattice
/// {0, Delta, 2 Delta, ...}, truncated at the last non-empty bin. Weights are
/// counts scaled by |F| / N_s, held in log space.
struct SpectralWeights {
    double e_lb = 0.0;
    double delta = 1.0;
    double e_max = 0.0;                // maximal sampled/enumerated objective
    std::vector<double> log_weights;   // per bin, kLogZero marks empty
    std::int64_t n_samples = 0;        // N_s (== |F| when exact)
    double log_feasible_count = kLogZero;
    bool exact = false;
    std::uint64_t seed = 0;            // sampling provenance, unused when exact

    std::size_t bin_count() const { return log_weights.size(); }
    /// ln sum of all bin weights (== ln |F| up to rounding).
    double log_total() const { return log_sum_exp(log_weights); }
};

/// One exactly-uniform sample from the feasible subspace. MNPP assigns each
/// item to a random partition, TSP draws a Fisher-Yates permutation, PO draws
/// a uniform weak composition via sorted cut points. Generic instances are
/// unsupported.
Bitstring sample_feasible(const ProblemInstance& inst, Rng& rng);

SpectralWeights estimate_spectral_weights(const ProblemInstance& inst, std::int64_t n_samples,
                                          double delta, double e_lb, std::uint64_t seed);

/// N_s -> infinity oracle: exact weights by full enumeration of F
/// (family-structured, or all bitstrings for small generic instances).
SpectralWeights exact_spectral_weights(const ProblemInstance& inst, double delta, double e_lb);

/// Enumerates the feasible subspace, invoking f(objective) per feasible point.
/// Throws EnumCapExceeded when |F| exceeds `cap`.
void for_each_feasible_objective(const ProblemInstance& inst,
                                 const std::function<void(double)>& f,
                                 std::uint64_t cap = 10'000'000);

/// Theorem-4 sample size: ceil(2 / (eps^2 delta^2)).
std::int64_t sample_size_for(double eps, double delta_prob);

/// Smallest bin width for which the finite-sample guarantee applies:
/// max(ln2 / (2 beta), (ln|F| - n ln 2)/beta + (E_ub - E_LB)).
double delta_floor(const ProblemInstance& inst, double beta);

} // namespace bigm

#endif // BIGM_SPECTRAL_HPP
