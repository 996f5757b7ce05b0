#ifndef BIGM_SOLVERS_HPP
#define BIGM_SOLVERS_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "bigm/problem.hpp"
#include "bigm/rng.hpp"
#include "bigm/walker.hpp"

namespace bigm {

struct SampleRecord {
    Bitstring x;
    EnergyBreakdown energy;
};

/// Outcome of a solver run: the raw samples plus the summary statistics used
/// throughout validation.
struct SolveReport {
    std::vector<SampleRecord> samples;
    double e_f = std::numeric_limits<double>::infinity();
    double eta_eff = 0.0;                 // fraction feasible with E^(o) <= E_f
    double mean_feasible_objective = 0.0; // NaN when no feasible sample
    double best_total = 0.0;
};

SolveReport make_report(std::vector<SampleRecord> samples, double e_f);

/// Fraction of samples that are feasible with objective at most e_f.
double estimate_eta_eff(const SolveReport& report, double e_f);

/// Exact Gibbs distribution over all 2^n energies at inverse temperature
/// beta: p(x) = e^{-beta E(x)} / Z, evaluated by full enumeration (n capped).
class GibbsExact {
public:
    GibbsExact(const QuboReformulation& reform, double beta);

    double beta() const { return beta_; }
    double log_partition() const { return log_z_; }
    std::size_t num_vars() const { return n_; }

    /// Pr[x in F and E^(o)(x) <= e_f].
    double success_probability(double e_f) const;
    double feasibility_probability() const;

    /// Exact mean of E^(o) conditioned on feasibility.
    double mean_feasible_objective() const;

    double log_probability(std::uint64_t code) const;
    /// Full probability vector indexed by bitstring code (small n only).
    std::vector<double> probabilities() const;

    /// i.i.d. draws via inverse CDF; deterministic under the seed.
    SolveReport sample(std::size_t count, std::uint64_t seed,
                       double e_f = std::numeric_limits<double>::infinity()) const;

private:
    const ProblemInstance* inst_;
    double m_ = 0.0;
    double beta_ = 0.0;
    std::size_t n_ = 0;
    std::vector<double> objective_;     // per code
    std::vector<std::int64_t> penalty_; // per code
    double log_z_ = 0.0;
};

/// Geometric temperature schedule T_k = t0 * ratio^k.
struct SaSchedule {
    double t0 = 1.0;
    double ratio = 0.95;
    int stages = 100;
    int sweeps_per_stage = 1;
};

/// Default schedule: t0 = |Q_total|_l1 / n, ratio chosen so the final stage
/// temperature matches 1 / beta_target.
SaSchedule make_geometric_schedule(const QuboReformulation& reform, double beta_target,
                                   int stages = 100, int sweeps_per_stage = 1);

/// Single-bit-flip Metropolis chain at a fixed temperature.
class MetropolisSampler {
public:
    MetropolisSampler(const QuboReformulation& reform, double temperature, Rng rng);

    void set_temperature(double t);
    void randomize_state();
    /// One proposed flip (accepted or rejected).
    void step();
    void sweep() {
        for (std::size_t i = 0; i < walker_.state().size(); ++i) step();
    }

    const Bitstring& state() const { return walker_.state(); }
    double total_energy() const;

private:
    const QuboReformulation* reform_;
    EnergyWalker walker_;
    double temperature_;
    Rng rng_;
};

/// Independent SA chains (one seeded stream per chain, merged by index); each
/// chain starts from a random bitstring and walks the geometric schedule.
SolveReport simulated_annealing(const QuboReformulation& reform, const SaSchedule& schedule,
                                std::size_t count, std::uint64_t seed,
                                double e_f = std::numeric_limits<double>::infinity());

struct BinarySearchResult {
    bool ok = false;
    double m = 0.0;
    int calls = 0;
    double eta_eff_at_m = 0.0;
};

/// Baseline strategy: halve M while the measured success rate stays at or
/// above eta; returns the last passing M and the number of solver calls.
BinarySearchResult binary_search_m(
    const ProblemInstance& inst,
    const std::function<double(const QuboReformulation&)>& measure_eta_eff, double eta,
    double m_init, int budget);

/// log2(M_l1 / M*): solver calls saved by starting binary search at M*.
double speedup_metric(double m_l1, double m_star);

} // namespace bigm

#endif // BIGM_SOLVERS_HPP
