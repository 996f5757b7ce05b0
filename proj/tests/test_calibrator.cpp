#include <doctest.h>

#include <cmath>

#include "bigm/calibrator.hpp"
#include "bigm/generators.hpp"
#include "bigm/solvers.hpp"
#include "test_support.hpp"

using namespace bigm;

namespace {

ProblemInstance mnpp_2_2_35() { return gen_mnpp({2, 2, {3.0, 5.0}, 0}); }

// Linear-space evaluation of the three bounds and g(M), used as the oracle
// for the log-space implementation. Mirrors the fully-below-threshold bin
// split.
struct LinearBounds {
    double b_low = 0.0;
    double b_high = 0.0;
};

LinearBounds linear_bounds(const SpectralWeights& w, double beta, double e_f) {
    LinearBounds out;
    for (std::size_t k = 0; k < w.bin_count(); ++k) {
        if (is_log_zero(w.log_weights[k])) continue;
        const double weight = std::exp(w.log_weights[k]);
        const double e = static_cast<double>(k) * w.delta;
        const double bin_end = w.e_lb + e + w.delta;
        const double tol = 1e-12 * std::max({1.0, std::abs(bin_end), std::abs(e_f)});
        if ((std::isinf(e_f) && e_f > 0) || bin_end <= e_f + tol) {
            out.b_low += weight * std::exp(-beta * (e + w.delta));
        } else {
            out.b_high += weight * std::exp(-beta * e);
        }
    }
    return out;
}

double linear_b_infeasible(const DegeneracyTable& table, double beta, double m) {
    double acc = 0.0;
    for (std::int64_t v = 1; v <= table.v_cut; ++v) {
        if (table.zero_at(v)) continue;
        acc += std::exp(table.log_at(v)) * std::exp(-beta * m * static_cast<double>(v));
    }
    return acc;
}

double linear_g(const SpectralWeights& w, const DegeneracyTable& table, double beta, double eta,
                double e_f, double m) {
    const LinearBounds lb = linear_bounds(w, beta, e_f);
    return linear_b_infeasible(table, beta, m) + lb.b_high - (1.0 - eta) / eta * lb.b_low;
}

} // namespace

TEST_CASE("log bound on low-objective feasible mass") {
    // Single bin of weight W at e = 0: ln W - beta Delta.
    SpectralWeights w;
    w.e_lb = 0.0;
    w.delta = 2.0;
    w.e_max = 1.0;
    w.log_weights = {std::log(7.0)};
    w.n_samples = 7;
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(log_bound_feasible_low(w, 0.3, inf) ==
          doctest::Approx(std::log(7.0) - 0.3 * 2.0).epsilon(1e-12));

    // beta = 0 reduces to ln of the total weight.
    SpectralWeights two = w;
    two.log_weights = {std::log(3.0), std::log(5.0)};
    CHECK(log_bound_feasible_low(two, 0.0, inf) == doctest::Approx(std::log(8.0)).epsilon(1e-12));

    // Exact MNPP weights at beta = 1e-2, E_f = inf: matches the linear sum.
    auto inst = mnpp_2_2_35();
    auto exact = exact_spectral_weights(inst, 1.0, 0.0);
    const double log_linear = std::log(linear_bounds(exact, 1e-2, inf).b_low);
    CHECK(log_bound_feasible_low(exact, 1e-2, inf) ==
          doctest::Approx(log_linear).epsilon(1e-12));

    // No bin fully below the threshold.
    CHECK_THROWS_AS(log_bound_feasible_low(exact, 1.0, 0.5), NoFeasibleTarget);
}

TEST_CASE("log bound on high-objective feasible mass") {
    auto inst = mnpp_2_2_35();
    auto exact = exact_spectral_weights(inst, 1.0, 0.0);
    const double inf = std::numeric_limits<double>::infinity();

    // E_f = inf: empty complement, -inf sentinel (B_F^> = 0).
    CHECK(is_log_zero(log_bound_feasible_high(exact, 0.5, inf)));

    // E_f below all bins: the whole lattice contributes with weights e^{-beta e}.
    const double all = log_bound_feasible_high(exact, 0.25, -1.0);
    double linear = 0.0;
    for (std::size_t k = 0; k < exact.bin_count(); ++k) {
        if (is_log_zero(exact.log_weights[k])) continue;
        linear += std::exp(exact.log_weights[k]) * std::exp(-0.25 * (k * exact.delta));
    }
    CHECK(all == doctest::Approx(std::log(linear)).epsilon(1e-12));

    // Two-bin split cross-checked against the linear oracle.
    const double e_f = 10.0;
    const LinearBounds lb = linear_bounds(exact, 0.25, e_f);
    CHECK(log_bound_feasible_high(exact, 0.25, e_f) ==
          doctest::Approx(std::log(lb.b_high)).epsilon(1e-12));
    CHECK(log_bound_feasible_low(exact, 0.25, e_f) ==
          doctest::Approx(std::log(lb.b_low)).epsilon(1e-12));
}

TEST_CASE("log bound on infeasible mass") {
    // TSP n_v = 2 table {2: 12, 4: 2} at beta = 1, M = 1.
    auto tsp = gen_tsp_circle(2, 1.0);
    auto table = npen_bruteforce(tsp, 4);
    const double value = log_bound_infeasible(table, 1.0, 1.0);
    CHECK(value ==
          doctest::Approx(std::log(12.0 * std::exp(-2.0) + 2.0 * std::exp(-4.0))).epsilon(1e-12));
    CHECK(value == doctest::Approx(0.507).epsilon(1e-3));

    // M = 0: ln of the total infeasible count.
    CHECK(log_bound_infeasible(table, 2.0, 0.0) == doctest::Approx(std::log(14.0)).epsilon(1e-12));

    // Monotone decreasing in M, diverging to -inf.
    double prev = value;
    for (double m = 2.0; m <= 512.0; m *= 4.0) {
        const double next = log_bound_infeasible(table, 1.0, m);
        CHECK(next < prev);
        prev = next;
    }
    CHECK(prev < -1000.0);

    // All-feasible table: -inf sentinel.
    DegeneracyTable empty;
    empty.v_cut = 3;
    empty.log_values = {std::log(4.0), kLogZero, kLogZero, kLogZero};
    CHECK(is_log_zero(log_bound_infeasible(empty, 1.0, 0.0)));
}

TEST_CASE("G function properties") {
    auto inst = mnpp_2_2_35();
    const double beta = 0.5;
    CalibrationBounds bounds;
    bounds.spectral = exact_spectral_weights(inst, 1.0, 0.0);
    bounds.degeneracy = npen_bruteforce(inst, penalty_upper_bound(inst));
    const double inf = std::numeric_limits<double>::infinity();
    bounds.log_b_low = log_bound_feasible_low(bounds.spectral, beta, inf);
    bounds.log_b_high = log_bound_feasible_high(bounds.spectral, beta, inf);

    // Strictly decreasing in M while the degeneracy table has mass.
    double prev = calibration_g(bounds, 0.5, beta, 0.0);
    for (double m = 0.5; m < 40.0; m += 0.5) {
        const double next = calibration_g(bounds, 0.5, beta, m);
        CHECK(next < prev);
        prev = next;
    }

    // eta -> 1 with a finite threshold (B_F^> > 0): -ln((1-eta)/eta)
    // diverges, so G stays positive for any M and no root exists.
    CalibrationBounds finite = bounds;
    finite.log_b_low = log_bound_feasible_low(finite.spectral, beta, 10.0);
    finite.log_b_high = log_bound_feasible_high(finite.spectral, beta, 10.0);
    CHECK(calibration_g(finite, 1.0 - 1e-12, beta, 1e9) > 0.0);

    // Log/linear sign agreement across a 100-point M grid.
    for (int i = 0; i < 100; ++i) {
        const double m = 0.35 * i;
        const double log_value = calibration_g(bounds, 0.5, beta, m);
        const double lin_value = linear_g(bounds.spectral, bounds.degeneracy, beta, 0.5, inf, m);
        if (std::abs(lin_value) > 1e-9 * (linear_b_infeasible(bounds.degeneracy, beta, m) +
                                          (1.0 / 0.5) * std::exp(bounds.log_b_low))) {
            CHECK_MESSAGE((log_value <= 0.0) == (lin_value <= 0.0), "m=", m);
        }
    }
}

TEST_CASE("eta_exist") {
    // B_F^> = 0 (E_f = inf): eta_exist = 1.
    CalibrationBounds bounds;
    bounds.log_b_low = std::log(2.0);
    bounds.log_b_high = kLogZero;
    CHECK(eta_exist(bounds) == 1.0);

    // Equal bounds: 0.5.
    bounds.log_b_high = bounds.log_b_low;
    CHECK(eta_exist(bounds) == doctest::Approx(0.5).epsilon(1e-12));

    // Small MNPP with finite E_f: matches the linear-space ratio.
    auto inst = mnpp_2_2_35();
    auto w = exact_spectral_weights(inst, 1.0, 0.0);
    const double beta = 0.1;
    const double e_f = 10.0;
    bounds.spectral = w;
    bounds.log_b_low = log_bound_feasible_low(w, beta, e_f);
    bounds.log_b_high = log_bound_feasible_high(w, beta, e_f);
    const LinearBounds lb = linear_bounds(w, beta, e_f);
    CHECK(eta_exist(bounds) ==
          doctest::Approx(lb.b_low / (lb.b_low + lb.b_high)).epsilon(1e-12));
}

TEST_CASE("lower bound provider") {
    CHECK(lower_bound_provider(gen_tsp_circle(3, 5.0), LowerBoundMode::trivial) == 0.0);

    auto inst = mnpp_2_2_35();
    // An absurdly large external bound is rejected against random bitstrings.
    CHECK_THROWS_AS(lower_bound_provider(inst, LowerBoundMode::external, 1e9, 1),
                    std::invalid_argument);
    CHECK(lower_bound_provider(inst, LowerBoundMode::external, -1.0, 1) == -1.0);
    CHECK_THROWS_AS(lower_bound_provider(inst, LowerBoundMode::external, std::nullopt, 1),
                    std::invalid_argument);

    // PO with all-negative returns and zero covariance: the trivial bound is
    // the sum of negative entries, below the exhaustive minimum.
    PoSpec spec;
    spec.assets = 3;
    spec.bits = 2;
    spec.risk_aversion = 1.0;
    spec.mu = {-0.1, -0.2, -0.3};
    spec.sigma.assign(9, 0.0);
    auto po = gen_po(spec);
    double min_obj = std::numeric_limits<double>::infinity();
    for (std::uint64_t code = 0; code < 64; ++code) {
        min_obj = std::min(min_obj, objective_energy(po, bitstring_from_code(code, 6)));
    }
    CHECK(objective_lower_bound_trivial(po) <= min_obj + 1e-12);
}

TEST_CASE("calibrate_m trivial at infinite temperature") {
    auto inst = mnpp_2_2_35(); // |F| / 2^n = 0.25
    CalibrationConfig cfg;
    cfg.beta = 1e-12;
    cfg.eta = 0.2;
    cfg.exact_weights = true;
    cfg.v_cut = penalty_upper_bound(inst);
    auto result = calibrate_m(inst, cfg);
    CHECK(result.status == CalibrationStatus::trivial);
    CHECK(result.m_star == 0.0);

    // Above the uniform feasible fraction the problem is not trivial.
    cfg.eta = 0.3;
    auto hard = calibrate_m(inst, cfg);
    CHECK(hard.status == CalibrationStatus::ok);
    CHECK(*hard.m_star > 0.0);
}

TEST_CASE("calibrate_m certifies the gibbs success probability") {
    auto inst = mnpp_2_2_35();
    CalibrationConfig cfg;
    cfg.beta = 1.0;
    cfg.eta = 0.5;
    cfg.exact_weights = true;
    cfg.v_cut = penalty_upper_bound(inst);
    auto result = calibrate_m(inst, cfg);
    REQUIRE(result.status == CalibrationStatus::ok);
    GibbsExact gibbs(build_qubo(inst, *result.m_star), cfg.beta);
    CHECK(gibbs.feasibility_probability() >= 0.5 - 1e-12);

    // Dominance (Lemma bracket): M* never exceeds the l1 baseline.
    CHECK(*result.m_star <= big_m_l1(inst, cfg.beta, cfg.eta) * (1.0 + 1e-9));
}

TEST_CASE("calibrate_m with unattainable eta reports eta_exist") {
    // 9-bit MNPP with a tight threshold at high temperature: requesting more
    // than eta_exist yields no_solution, and auto-reduction recovers a
    // guarantee verified by exact enumeration.
    auto inst = gen_mnpp({3, 3, {4.0, 7.0, 13.0}, 0});
    CalibrationConfig cfg;
    cfg.beta = 1e-3;
    cfg.eta = 0.99;
    cfg.exact_weights = true;
    cfg.v_cut = penalty_upper_bound(inst);
    cfg.delta = 2.0;

    // Median feasible objective as the threshold.
    std::vector<double> energies;
    for_each_feasible_objective(inst, [&](double e) { energies.push_back(e); });
    std::sort(energies.begin(), energies.end());
    cfg.e_f = energies[energies.size() / 2];

    auto result = calibrate_m(inst, cfg);
    REQUIRE(result.status == CalibrationStatus::no_solution);
    CHECK(result.eta_exist_value < 0.99);

    cfg.auto_reduce_eta = true;
    auto reduced = calibrate_m(inst, cfg);
    REQUIRE(reduced.status == CalibrationStatus::reduced_eta);
    CHECK(reduced.eta_used < reduced.eta_exist_value);
    CHECK(reduced.eta_used < 0.99);
    REQUIRE(reduced.m_star.has_value());
    GibbsExact gibbs(build_qubo(inst, *reduced.m_star), cfg.beta);
    CHECK(gibbs.success_probability(cfg.e_f) >= reduced.eta_used - 1e-12);
}

TEST_CASE("calibrate_m propagates errors") {
    auto inst = mnpp_2_2_35();
    CalibrationConfig cfg;
    cfg.e_f = -5.0; // below the lower bound
    CHECK_THROWS_AS(calibrate_m(inst, cfg), NoFeasibleTarget);

    CalibrationConfig bad;
    bad.beta = -1.0;
    CHECK_THROWS_AS(calibrate_m(inst, bad), std::invalid_argument);

    // Generic family without supplied weights: the sampler is unsupported.
    auto generic = test::make_generic(2, {}, {{1, 1}}, {1});
    CalibrationConfig plain;
    CHECK_THROWS_AS(calibrate_m(generic, plain), UnsupportedFamily);

    // Supplying tables makes the generic case calibratable.
    auto weights = exact_spectral_weights(generic, 1.0, 0.0);
    auto table = npen_bruteforce(generic, penalty_upper_bound(generic));
    auto result = calibrate_m(generic, plain, weights, table);
    CHECK(result.status == CalibrationStatus::ok);
}

TEST_CASE("calibrate_beta inverse problem") {
    auto inst = mnpp_2_2_35();
    CalibrationConfig cfg;
    cfg.eta = 0.5;
    cfg.exact_weights = true;
    cfg.v_cut = penalty_upper_bound(inst);

    // Fixed moderate M: the returned beta* certifies the bound, and the exact
    // Gibbs feasibility probability at beta* meets the target (feasibility is
    // non-decreasing in beta for fixed large-enough M on this instance).
    const double m_fixed = 12.0;
    auto result = calibrate_beta(inst, cfg, m_fixed);
    REQUIRE(result.status == CalibrationStatus::ok);
    REQUIRE(result.beta_star.has_value());
    GibbsExact gibbs(build_qubo(inst, m_fixed), *result.beta_star);
    CHECK(gibbs.feasibility_probability() >= 0.5 - 1e-12);

    // Monotonicity witness for the claim above.
    double prev = 0.0;
    for (double beta : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0}) {
        const double p = GibbsExact(build_qubo(inst, m_fixed), beta).feasibility_probability();
        CHECK(p >= prev - 1e-12);
        prev = p;
    }

    // M = 0 with eta above the uniform feasible fraction: no temperature can
    // be certified (penalty-free suppression is impossible).
    auto zero_m = calibrate_beta(inst, cfg, 0.0);
    CHECK(zero_m.status == CalibrationStatus::no_solution);
    CHECK_FALSE(zero_m.beta_star.has_value());

    // Contract: the returned beta* itself satisfies G <= 0 when the bounds
    // are rebuilt at it.
    auto weights = exact_spectral_weights(inst, 0.5, 0.0);
    auto table = npen_bruteforce(inst, penalty_upper_bound(inst));
    auto direct = calibrate_beta(inst, cfg, m_fixed, weights, table);
    REQUIRE(direct.beta_star.has_value());
    CalibrationBounds at_root;
    at_root.spectral = weights;
    at_root.degeneracy = table;
    at_root.log_b_low = log_bound_feasible_low(weights, *direct.beta_star, cfg.e_f);
    at_root.log_b_high = log_bound_feasible_high(weights, *direct.beta_star, cfg.e_f);
    CHECK(calibration_g(at_root, cfg.eta, *direct.beta_star, m_fixed) <= 0.0);
}

TEST_CASE("soundness fuzz over random instances and configurations") {
    // Random instances, temperatures, targets and thresholds: whenever the
    // calibration certifies, the exact Gibbs probability must meet the target.
    Rng fuzz(20250808);
    int certified = 0;
    for (int round = 0; round < 150; ++round) {
        ProblemInstance inst = [&]() -> ProblemInstance {
            switch (fuzz.below(3)) {
            case 0: {
                const std::int64_t items = 2 + static_cast<std::int64_t>(fuzz.below(3));
                const std::int64_t parts = 2 + static_cast<std::int64_t>(fuzz.below(2));
                std::vector<double> values(static_cast<std::size_t>(items));
                for (double& v : values) v = fuzz.uniform(0.1, 20.0);
                return gen_mnpp({items, parts, values, 0});
            }
            case 1:
                return gen_tsp_random(3, fuzz.uniform(1.0, 1000.0), fuzz.next_u64());
            default:
                return gen_po(synthetic_po_spec(
                    2 + static_cast<std::int64_t>(fuzz.below(3)),
                    1 + static_cast<std::int64_t>(fuzz.below(3)), fuzz.uniform(0.1, 2.0),
                    fuzz.next_u64()));
            }
        }();
        if (inst.num_vars() > 12) continue;

        CalibrationConfig cfg;
        cfg.beta = std::exp(fuzz.uniform(-8.0, 1.0));
        cfg.eta = fuzz.uniform(0.05, 0.95);
        cfg.exact_weights = true;
        cfg.v_cut = penalty_upper_bound(inst);
        if (fuzz.below(2) == 0) {
            std::vector<double> energies;
            for_each_feasible_objective(inst, [&](double e) { energies.push_back(e); });
            std::sort(energies.begin(), energies.end());
            cfg.e_f = energies[static_cast<std::size_t>(
                fuzz.below(energies.size()))];
        }
        CalibrationResult result;
        try {
            result = calibrate_m(inst, cfg);
        } catch (const NoFeasibleTarget&) {
            continue;
        }
        if (result.status != CalibrationStatus::ok &&
            result.status != CalibrationStatus::trivial)
            continue;
        const double p =
            GibbsExact(build_qubo(inst, *result.m_star), cfg.beta).success_probability(cfg.e_f);
        CHECK_MESSAGE(p >= cfg.eta - 1e-12, "round=", round, " beta=", cfg.beta,
                      " eta=", cfg.eta, " e_f=", cfg.e_f, " p=", p);
        ++certified;
    }
    CHECK(certified > 50);
}

TEST_CASE("soundness sweep over small instances") {
    // Exact-weights regime: whenever calibration reports ok/trivial, the
    // exact Gibbs probability of the target event meets eta.
    const std::vector<ProblemInstance> instances = {
        mnpp_2_2_35(),
        gen_mnpp({3, 2, {1.0, 5.0, 6.0}, 0}),
        gen_tsp_circle(3, 10.0),
        gen_po(synthetic_po_spec(3, 2, 1.0, 8)),
    };
    int certified = 0;
    for (const auto& inst : instances) {
        std::vector<double> energies;
        for_each_feasible_objective(inst, [&](double e) { energies.push_back(e); });
        std::sort(energies.begin(), energies.end());
        const double median = energies[energies.size() / 2];
        for (const double beta : {1e-3, 0.1, 1.0}) {
            for (const double eta : {0.25, 0.5, 0.75}) {
                for (const double e_f :
                     {std::numeric_limits<double>::infinity(), median}) {
                    CalibrationConfig cfg;
                    cfg.beta = beta;
                    cfg.eta = eta;
                    cfg.e_f = e_f;
                    cfg.exact_weights = true;
                    cfg.v_cut = penalty_upper_bound(inst);
                    CalibrationResult result;
                    try {
                        result = calibrate_m(inst, cfg);
                    } catch (const NoFeasibleTarget&) {
                        continue;
                    }
                    if (result.status != CalibrationStatus::ok &&
                        result.status != CalibrationStatus::trivial)
                        continue;
                    GibbsExact gibbs(build_qubo(inst, *result.m_star), beta);
                    CHECK_MESSAGE(gibbs.success_probability(e_f) >= eta - 1e-12,
                                  "beta=", beta, " eta=", eta, " e_f=", e_f);
                    ++certified;
                }
            }
        }
    }
    CHECK(certified > 30); // the sweep must actually exercise the guarantee
}
