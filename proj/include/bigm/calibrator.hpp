#ifndef BIGM_CALIBRATOR_HPP
#define BIGM_CALIBRATOR_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bigm/degeneracy.hpp"
#include "bigm/problem.hpp"
#include "bigm/spectral.hpp"

namespace bigm {

// Thrown when no lattice bin lies fully below the energy threshold.
struct NoFeasibleTarget : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class DeltaMode {
    guaranteed, // enforce the delta floor required by the sampled-regime guarantee
    practical   // allow finer bins (tighter bound) without the statistical certificate
};

enum class LowerBoundMode { trivial, external };

struct CalibrationConfig {
    double beta = 1.0;
    double eta = 0.5;
    double e_f = std::numeric_limits<double>::infinity();
    std::int64_t v_cut = 0;      // 0: family default (4 MNPP/TSP, 16 PO, v_max generic)
    std::int64_t n_samples = 20000;
    double delta = 0.0;          // 0: automatic
    DeltaMode delta_mode = DeltaMode::guaranteed;
    std::uint64_t seed = 0;
    bool exact_weights = false;  // enumerate F instead of sampling
    bool auto_reduce_eta = false;
    double eta_reduce_step = 0.01;
    LowerBoundMode lb_mode = LowerBoundMode::trivial;
    std::optional<double> external_lower_bound;
};

/// The three probability bounds of Algorithm 1 at a fixed inverse temperature,
/// together with their inputs.
struct CalibrationBounds {
    double log_b_low = kLogZero;   // ln B_F^<
    double log_b_high = kLogZero;  // ln B_F^>, kLogZero when E_f = infinity
    DegeneracyTable degeneracy;
    SpectralWeights spectral;
};

/// ln B_F^< : LSE over fully-below-threshold bins of ln w(e) - beta (e + Delta).
/// Throws NoFeasibleTarget when no bin qualifies or all qualifying bins are
/// empty.
double log_bound_feasible_low(const SpectralWeights& w, double beta, double e_f);

/// ln B_F^> : LSE over the remaining bins of ln w(e) - beta e; kLogZero when
/// the complement is empty (including E_f = infinity).
double log_bound_feasible_high(const SpectralWeights& w, double beta, double e_f);

/// ln B_Fbar(M) : LSE over v = 1..v_cut of ln n_pen(v) - beta M v.
double log_bound_infeasible(const DegeneracyTable& table, double beta, double m);

/// G(M) = ln(B_Fbar(M) + B_F^>) - ln((1-eta)/eta) - ln B_F^<; same sign and
/// root as the linear-space g(M).
double calibration_g(const CalibrationBounds& bounds, double eta, double beta, double m);

/// Maximal achievable target probability: (1 + e^gamma)^-1 with
/// gamma = ln B_F^> - ln B_F^<.
double eta_exist(const CalibrationBounds& bounds);

/// E_LB provider. Trivial mode delegates to objective_lower_bound_trivial;
/// external mode validates the supplied bound against random bitstrings.
double lower_bound_provider(const ProblemInstance& inst, LowerBoundMode mode,
                            std::optional<double> external = std::nullopt,
                            std::uint64_t seed = 0);

enum class CalibrationStatus { ok, trivial, reduced_eta, no_solution };

std::string status_name(CalibrationStatus s);

struct CalibrationDiagnostics {
    double delta_used = 0.0;
    double e_lb = 0.0;
    double log_b_low = kLogZero;
    double log_b_high = kLogZero;
    double log_b_infeasible_at_m = kLogZero;
    int root_iterations = 0;
    int bracket_doublings = 0;
    DegeneracyTable::Source degeneracy_source = DegeneracyTable::Source::brute_force;
    bool spectral_exact = false;
    bool spectral_truncated = false; // lattice ends at the maximal sampled energy
    bool delta_floor_applied = false;
    std::int64_t v_cut_used = 0;
    std::int64_t n_samples_used = 0;
    std::vector<std::string> notes;
};

struct CalibrationResult {
    std::optional<double> m_star;
    double eta_used = 0.0;
    double eta_exist_value = 1.0;
    CalibrationStatus status = CalibrationStatus::no_solution;
    CalibrationDiagnostics diagnostics;
};

/// Algorithm 1: calibrate the penalty weight M for a Gibbs solver at
/// cfg.beta. The returned M is the upper bisection endpoint, so G(M*) <= 0 is
/// guaranteed whenever status is ok.
CalibrationResult calibrate_m(const ProblemInstance& inst, const CalibrationConfig& cfg);

/// Variant with caller-supplied tables (e.g. generic families without a
/// uniform sampler, or synthetic stress inputs).
CalibrationResult calibrate_m(const ProblemInstance& inst, const CalibrationConfig& cfg,
                              const SpectralWeights& spectral, const DegeneracyTable& degeneracy);

struct BetaCalibrationResult {
    std::optional<double> beta_star;
    CalibrationStatus status = CalibrationStatus::no_solution;
    double eta_used = 0.0;
    CalibrationDiagnostics diagnostics;
};

/// Inverse problem: find the inverse temperature beta* such that the bound
/// certifies the target at a fixed penalty weight M. All three bounds are
/// beta-dependent, so they are re-evaluated per probe; the spectral histogram
/// is computed once and reused (only the exponential factors change).
BetaCalibrationResult calibrate_beta(const ProblemInstance& inst, const CalibrationConfig& cfg,
                                     double m_fixed);

BetaCalibrationResult calibrate_beta(const ProblemInstance& inst, const CalibrationConfig& cfg,
                                     double m_fixed, const SpectralWeights& spectral,
                                     const DegeneracyTable& degeneracy);

} // namespace bigm

#endif // BIGM_CALIBRATOR_HPP
