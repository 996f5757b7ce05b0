#include "bigm/calibrator.hpp"

#include <cmath>
#include <functional>

#include "bigm/rng.hpp"

namespace bigm {

namespace {

// Bins counted into B_F^< must lie entirely below the threshold; the bin
// straddling E_f goes to the complement so that B_F^< remains a valid lower
// bound on Pr[F and E^(o) <= E_f] for any E_f, not only lattice multiples.
bool bin_fully_below(const SpectralWeights& w, std::size_t k, double e_f) {
    if (std::isinf(e_f) && e_f > 0) return true;
    const double bin_end = w.e_lb + (static_cast<double>(k) + 1.0) * w.delta;
    const double tol = 1e-12 * std::max({1.0, std::abs(bin_end), std::abs(e_f)});
    return bin_end <= e_f + tol;
}

} // namespace

double log_bound_feasible_low(const SpectralWeights& w, double beta, double e_f) {
    if (!(beta >= 0.0)) throw std::invalid_argument("log_bound_feasible_low: beta must be >= 0");
    std::vector<double> terms;
    terms.reserve(w.bin_count());
    bool any_bin = false;
    for (std::size_t k = 0; k < w.bin_count(); ++k) {
        if (!bin_fully_below(w, k, e_f)) break;
        any_bin = true;
        const double lw = w.log_weights[k];
        if (is_log_zero(lw)) continue;
        const double e = static_cast<double>(k) * w.delta;
        terms.push_back(lw - beta * (e + w.delta));
    }
    if (!any_bin)
        throw NoFeasibleTarget("log_bound_feasible_low: no lattice bin fully below E_f");
    const double result = log_sum_exp(terms);
    if (is_log_zero(result))
        throw NoFeasibleTarget("log_bound_feasible_low: no feasible mass observed below E_f");
    return result;
}

double log_bound_feasible_high(const SpectralWeights& w, double beta, double e_f) {
    if (!(beta >= 0.0)) throw std::invalid_argument("log_bound_feasible_high: beta must be >= 0");
    std::vector<double> terms;
    for (std::size_t k = 0; k < w.bin_count(); ++k) {
        if (bin_fully_below(w, k, e_f)) continue;
        const double lw = w.log_weights[k];
        if (is_log_zero(lw)) continue;
        const double e = static_cast<double>(k) * w.delta;
        terms.push_back(lw - beta * e);
    }
    return log_sum_exp(terms);
}

double log_bound_infeasible(const DegeneracyTable& table, double beta, double m) {
    if (!(m >= 0.0)) throw std::invalid_argument("log_bound_infeasible: M must be >= 0");
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(table.v_cut));
    for (std::int64_t v = 1; v <= table.v_cut; ++v) {
        const double lv = table.log_at(v);
        if (is_log_zero(lv)) continue;
        terms.push_back(lv - beta * m * static_cast<double>(v));
    }
    return log_sum_exp(terms);
}

double calibration_g(const CalibrationBounds& bounds, double eta, double beta, double m) {
    if (!(eta > 0.0 && eta < 1.0))
        throw std::invalid_argument("calibration_g: eta must be in (0,1)");
    if (is_log_zero(bounds.log_b_low))
        throw NoFeasibleTarget("calibration_g: ln B_F^< is not finite");
    const double log_infeasible = log_bound_infeasible(bounds.degeneracy, beta, m);
    const double log_numerator = log_add(log_infeasible, bounds.log_b_high);
    return log_numerator - std::log((1.0 - eta) / eta) - bounds.log_b_low;
}

double eta_exist(const CalibrationBounds& bounds) {
    if (is_log_zero(bounds.log_b_low))
        throw NoFeasibleTarget("eta_exist: ln B_F^< is not finite");
    const double gamma = bounds.log_b_high - bounds.log_b_low;
    if (is_log_zero(bounds.log_b_high)) return 1.0;
    return 1.0 / (1.0 + std::exp(gamma));
}

double lower_bound_provider(const ProblemInstance& inst, LowerBoundMode mode,
                            std::optional<double> external, std::uint64_t seed) {
    if (mode == LowerBoundMode::trivial) return objective_lower_bound_trivial(inst);
    if (!external)
        throw std::invalid_argument("lower_bound_provider: external mode needs a value");
    // Validate against random bitstrings: a bound exceeding any observed
    // objective is certainly wrong.
    Rng rng(seed);
    const std::size_t n = inst.num_vars();
    Bitstring x(n, 0);
    for (int s = 0; s < 1000; ++s) {
        for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>(rng.next_u64() & 1u);
        const double obj = objective_energy(inst, x);
        if (*external > obj + 1e-12 * std::max(1.0, std::abs(obj)))
            throw std::invalid_argument(
                "lower_bound_provider: supplied bound exceeds an observed objective");
    }
    return *external;
}

std::string status_name(CalibrationStatus s) {
    switch (s) {
    case CalibrationStatus::ok: return "ok";
    case CalibrationStatus::trivial: return "trivial";
    case CalibrationStatus::reduced_eta: return "reduced_eta";
    case CalibrationStatus::no_solution: return "no_solution";
    }
    return "no_solution";
}

namespace {

constexpr int kMaxDoublings = 60;
constexpr double kRelTol = 1e-9;

struct RootOutcome {
    std::optional<double> root; // upper bracket endpoint, G(root) <= 0
    int iterations = 0;
    int doublings = 0;
};

// Bisection for a non-increasing G with G(0) > 0; the bracket ceiling doubles
// from `hi_start` until G <= 0 or the doubling cap is hit. The returned value
// is the endpoint with G <= 0 (rounded up), preserving the guarantee.
RootOutcome find_root(const std::function<double(double)>& g, double hi_start) {
    RootOutcome out;
    double lo = 0.0;
    double hi = std::max(hi_start, 1e-300);
    while (g(hi) > 0.0) {
        if (++out.doublings > kMaxDoublings) return out;
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > kRelTol * std::max(hi, 1.0)) {
        if (++out.iterations > 200) break;
        const double mid = 0.5 * (lo + hi);
        if (g(mid) <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    out.root = hi;
    return out;
}

SpectralWeights build_spectral(const ProblemInstance& inst, const CalibrationConfig& cfg,
                               double e_lb, CalibrationDiagnostics& diag) {
    // Collect feasible objective energies first; the automatic bin width needs
    // the sampled range.
    std::vector<double> energies;
    const bool exact = cfg.exact_weights;
    if (exact) {
        for_each_feasible_objective(inst, [&](double e) { energies.push_back(e); });
    } else {
        Rng rng(cfg.seed);
        energies.reserve(static_cast<std::size_t>(cfg.n_samples));
        for (std::int64_t s = 0; s < cfg.n_samples; ++s)
            energies.push_back(objective_energy(inst, sample_feasible(inst, rng)));
    }

    double e_max = e_lb;
    for (double e : energies) e_max = std::max(e_max, e);

    double delta = cfg.delta;
    if (delta <= 0.0) {
        const double span = e_max - e_lb;
        delta = span > 0.0 ? span / 256.0 : 1.0;
        // The floor controls the finite-sample estimation error; exact
        // enumeration has none, and any bin width preserves the guarantee.
        if (cfg.delta_mode == DeltaMode::guaranteed && !exact) {
            const double floor = delta_floor(inst, cfg.beta);
            if (floor > delta) {
                delta = floor;
                diag.delta_floor_applied = true;
            }
        }
    }
    diag.delta_used = delta;
    diag.spectral_exact = exact;

    SpectralWeights w;
    if (exact) {
        w = exact_spectral_weights(inst, delta, e_lb);
    } else {
        // Same seed, so the estimator re-draws exactly the energies used to
        // size the bins.
        w = estimate_spectral_weights(inst, cfg.n_samples, delta, e_lb, cfg.seed);
    }
    diag.spectral_truncated = true; // lattice always stops at the last sampled energy
    diag.n_samples_used = w.n_samples;
    return w;
}

DegeneracyTable build_degeneracy(const ProblemInstance& inst, const CalibrationConfig& cfg,
                                 CalibrationDiagnostics& diag) {
    std::int64_t v_cut = cfg.v_cut > 0 ? cfg.v_cut : default_v_cut(inst);
    v_cut = std::min(v_cut, penalty_upper_bound(inst));
    v_cut = std::max<std::int64_t>(v_cut, 1);
    DegeneracyTable table = degeneracy_for(inst, v_cut, cfg.seed);
    diag.degeneracy_source = table.source;
    diag.v_cut_used = table.v_cut;
    return table;
}

CalibrationResult calibrate_with_bounds(const CalibrationBounds& bounds, double beta, double eta,
                                        double m_l1_bracket, bool auto_reduce,
                                        double eta_reduce_step, CalibrationDiagnostics diag) {
    CalibrationResult result;
    result.diagnostics = std::move(diag);
    result.diagnostics.log_b_low = bounds.log_b_low;
    result.diagnostics.log_b_high = bounds.log_b_high;
    result.eta_used = eta;
    result.eta_exist_value = eta_exist(bounds);

    const auto run_for_eta = [&](double eta_now) -> std::optional<CalibrationResult> {
        CalibrationResult r = result;
        r.eta_used = eta_now;
        if (calibration_g(bounds, eta_now, beta, 0.0) <= 0.0) {
            r.m_star = 0.0;
            r.status = CalibrationStatus::trivial;
            return r;
        }
        if (eta_now >= r.eta_exist_value) return std::nullopt;
        const RootOutcome root = find_root(
            [&](double m) { return calibration_g(bounds, eta_now, beta, m); }, m_l1_bracket);
        r.diagnostics.root_iterations = root.iterations;
        r.diagnostics.bracket_doublings = root.doublings;
        if (!root.root) return std::nullopt;
        r.m_star = root.root;
        r.status = CalibrationStatus::ok;
        r.diagnostics.log_b_infeasible_at_m =
            log_bound_infeasible(bounds.degeneracy, beta, *root.root);
        return r;
    };

    if (auto outcome = run_for_eta(eta)) return *outcome;

    result.status = CalibrationStatus::no_solution;
    if (auto_reduce) {
        const double reduced = result.eta_exist_value - eta_reduce_step;
        if (reduced > 0.0) {
            if (auto outcome = run_for_eta(reduced)) {
                outcome->status = outcome->status == CalibrationStatus::trivial
                                      ? CalibrationStatus::trivial
                                      : CalibrationStatus::reduced_eta;
                outcome->diagnostics.notes.push_back("eta reduced below eta_exist");
                return *outcome;
            }
            result.diagnostics.notes.push_back("eta reduction failed to produce a root");
        } else {
            result.diagnostics.notes.push_back("eta_exist too small for reduction");
        }
    }
    return result;
}

} // namespace

CalibrationResult calibrate_m(const ProblemInstance& inst, const CalibrationConfig& cfg,
                              const SpectralWeights& spectral,
                              const DegeneracyTable& degeneracy) {
    if (!(cfg.beta > 0.0)) throw std::invalid_argument("calibrate_m: beta must be positive");
    if (!(cfg.eta > 0.0 && cfg.eta < 1.0))
        throw std::invalid_argument("calibrate_m: eta must be in (0,1)");

    CalibrationDiagnostics diag;
    diag.e_lb = spectral.e_lb;
    diag.delta_used = spectral.delta;
    diag.spectral_exact = spectral.exact;
    diag.n_samples_used = spectral.n_samples;
    diag.degeneracy_source = degeneracy.source;
    diag.v_cut_used = degeneracy.v_cut;

    CalibrationBounds bounds;
    bounds.spectral = spectral;
    bounds.degeneracy = degeneracy;
    bounds.log_b_low = log_bound_feasible_low(spectral, cfg.beta, cfg.e_f);
    bounds.log_b_high = log_bound_feasible_high(spectral, cfg.beta, cfg.e_f);

    return calibrate_with_bounds(bounds, cfg.beta, cfg.eta, big_m_l1(inst, cfg.beta, cfg.eta),
                                 cfg.auto_reduce_eta, cfg.eta_reduce_step, std::move(diag));
}

CalibrationResult calibrate_m(const ProblemInstance& inst, const CalibrationConfig& cfg) {
    if (!(cfg.beta > 0.0)) throw std::invalid_argument("calibrate_m: beta must be positive");
    if (!(cfg.eta > 0.0 && cfg.eta < 1.0))
        throw std::invalid_argument("calibrate_m: eta must be in (0,1)");

    CalibrationDiagnostics diag;
    const double e_lb =
        lower_bound_provider(inst, cfg.lb_mode, cfg.external_lower_bound, cfg.seed);
    diag.e_lb = e_lb;
    if (!std::isinf(cfg.e_f) && cfg.e_f < e_lb)
        throw NoFeasibleTarget("calibrate_m: E_f below the objective lower bound");

    const SpectralWeights spectral = build_spectral(inst, cfg, e_lb, diag);
    const DegeneracyTable degeneracy = build_degeneracy(inst, cfg, diag);

    CalibrationBounds bounds;
    bounds.spectral = spectral;
    bounds.degeneracy = degeneracy;
    bounds.log_b_low = log_bound_feasible_low(spectral, cfg.beta, cfg.e_f);
    bounds.log_b_high = log_bound_feasible_high(spectral, cfg.beta, cfg.e_f);

    return calibrate_with_bounds(bounds, cfg.beta, cfg.eta, big_m_l1(inst, cfg.beta, cfg.eta),
                                 cfg.auto_reduce_eta, cfg.eta_reduce_step, std::move(diag));
}

namespace {

BetaCalibrationResult calibrate_beta_impl(const CalibrationConfig& cfg, double m_fixed,
                                          const SpectralWeights& spectral,
                                          const DegeneracyTable& degeneracy,
                                          CalibrationDiagnostics diag) {
    if (!(m_fixed >= 0.0)) throw std::invalid_argument("calibrate_beta: M must be >= 0");

    BetaCalibrationResult result;
    result.eta_used = cfg.eta;
    result.diagnostics = std::move(diag);

    const auto g_of_beta = [&](double beta) {
        CalibrationBounds bounds;
        bounds.degeneracy = degeneracy;
        bounds.spectral = spectral;
        bounds.log_b_low = log_bound_feasible_low(spectral, beta, cfg.e_f);
        bounds.log_b_high = log_bound_feasible_high(spectral, beta, cfg.e_f);
        return calibration_g(bounds, cfg.eta, beta, m_fixed);
    };

    if (g_of_beta(0.0) <= 0.0) {
        // Even the uniform (infinite-temperature) bound certifies the target.
        result.beta_star = 0.0;
        result.status = CalibrationStatus::trivial;
        return result;
    }
    const RootOutcome root = find_root(g_of_beta, 1.0);
    result.diagnostics.root_iterations = root.iterations;
    result.diagnostics.bracket_doublings = root.doublings;
    if (!root.root) {
        result.status = CalibrationStatus::no_solution;
        return result;
    }
    result.beta_star = root.root;
    result.status = CalibrationStatus::ok;
    return result;
}

} // namespace

BetaCalibrationResult calibrate_beta(const ProblemInstance& /*inst*/,
                                     const CalibrationConfig& cfg, double m_fixed,
                                     const SpectralWeights& spectral,
                                     const DegeneracyTable& degeneracy) {
    CalibrationDiagnostics diag;
    diag.e_lb = spectral.e_lb;
    diag.delta_used = spectral.delta;
    diag.spectral_exact = spectral.exact;
    diag.n_samples_used = spectral.n_samples;
    diag.degeneracy_source = degeneracy.source;
    diag.v_cut_used = degeneracy.v_cut;
    return calibrate_beta_impl(cfg, m_fixed, spectral, degeneracy, std::move(diag));
}

BetaCalibrationResult calibrate_beta(const ProblemInstance& inst, const CalibrationConfig& cfg,
                                     double m_fixed) {
    CalibrationDiagnostics diag;
    const double e_lb =
        lower_bound_provider(inst, cfg.lb_mode, cfg.external_lower_bound, cfg.seed);
    diag.e_lb = e_lb;
    if (!std::isinf(cfg.e_f) && cfg.e_f < e_lb)
        throw NoFeasibleTarget("calibrate_beta: E_f below the objective lower bound");

    // The delta floor depends on beta, which is the unknown here; resolve the
    // bin width in practical mode (or take the explicit cfg.delta).
    CalibrationConfig resolved = cfg;
    resolved.delta_mode = DeltaMode::practical;
    const SpectralWeights spectral = build_spectral(inst, resolved, e_lb, diag);
    const DegeneracyTable degeneracy = build_degeneracy(inst, resolved, diag);
    if (cfg.delta_mode == DeltaMode::guaranteed && cfg.delta <= 0.0)
        diag.notes.push_back("inverse calibration uses practical bin width (floor needs beta)");
    return calibrate_beta_impl(cfg, m_fixed, spectral, degeneracy, std::move(diag));
}

} // namespace bigm
