#include <doctest.h>

#include <cstdio>

#include "bigm/calibrator.hpp"
#include "bigm/generators.hpp"
#include "bigm/serialization.hpp"
#include "bigm/solvers.hpp"
#include "test_support.hpp"

using namespace bigm;

namespace {

bool same_instance(const ProblemInstance& a, const ProblemInstance& b) {
    if (a.num_vars() != b.num_vars() || a.num_constraints() != b.num_constraints()) return false;
    if (a.family() != b.family()) return false;
    if (a.objective_offset() != b.objective_offset()) return false;
    for (std::size_t i = 0; i < a.num_vars(); ++i) {
        for (std::size_t j = 0; j < a.num_vars(); ++j) {
            if (a.quad().at(i, j) != b.quad().at(i, j)) return false;
        }
        if (a.linear()[i] != b.linear()[i]) return false;
    }
    if (a.rhs() != b.rhs()) return false;
    for (std::size_t r = 0; r < a.num_constraints(); ++r) {
        const auto& ra = a.constraints().rows[r];
        const auto& rb = b.constraints().rows[r];
        if (ra.size() != rb.size()) return false;
        for (std::size_t k = 0; k < ra.size(); ++k) {
            if (ra[k].col != rb[k].col || ra[k].coeff != rb[k].coeff) return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("instance json round trip is bit-exact") {
    const std::vector<ProblemInstance> instances = {
        gen_mnpp({3, 2, {}, 17}), // irrational-ish random values
        gen_tsp_circle(3, 1e6),   // irrational chord lengths
        gen_po(synthetic_po_spec(3, 2, 1.25, 5)),
        test::make_generic(2, {0.1, -2.0 / 3.0, 0.0, 5e-17}, {{1, -2}}, {1}, 0.125),
    };
    for (const auto& inst : instances) {
        const Json j = instance_to_json(inst);
        // Serialize to text and parse back: numbers must survive exactly.
        const auto restored_j = Json::parse(j.dump());
        const ProblemInstance restored = instance_from_json(restored_j);
        CHECK(same_instance(inst, restored));

        // A second round trip is byte-identical.
        CHECK(instance_to_json(restored).dump() == j.dump());

        // Energies agree exactly on a few bitstrings.
        Rng rng(3);
        for (int trial = 0; trial < 20; ++trial) {
            Bitstring x(inst.num_vars());
            for (auto& bit : x) bit = static_cast<std::uint8_t>(rng.next_u64() & 1u);
            CHECK(objective_energy(inst, x) == objective_energy(restored, x));
            CHECK(penalty_energy(inst, x) == penalty_energy(restored, x));
        }
    }
}

TEST_CASE("degeneracy table round trip") {
    auto inst = gen_mnpp({3, 3, {}, 2});
    auto table = npen_bruteforce(inst, 6);
    const Json j = degeneracy_to_json(table);
    CHECK(j.contains("source"));
    CHECK(j.contains("v_cut"));
    CHECK(j.contains("log_values"));
    CHECK(j.contains("zero_mask"));
    auto restored = degeneracy_from_json(Json::parse(j.dump()));
    CHECK(restored.v_cut == table.v_cut);
    REQUIRE(restored.log_values.size() == table.log_values.size());
    for (std::size_t v = 0; v < table.log_values.size(); ++v) {
        CHECK(restored.log_values[v] == table.log_values[v]);
    }
}

TEST_CASE("spectral weights round trip") {
    auto inst = gen_mnpp({2, 2, {3.0, 5.0}, 0});
    auto w = estimate_spectral_weights(inst, 4096, 0.7, 0.0, 9);
    auto restored = spectral_from_json(Json::parse(spectral_to_json(w).dump()));
    CHECK(restored.e_lb == w.e_lb);
    CHECK(restored.delta == w.delta);
    CHECK(restored.e_max == w.e_max);
    CHECK(restored.n_samples == w.n_samples);
    CHECK(restored.log_feasible_count == w.log_feasible_count);
    CHECK(restored.seed == 9); // sampling provenance travels with the weights
    REQUIRE(restored.log_weights.size() == w.log_weights.size());
    for (std::size_t k = 0; k < w.log_weights.size(); ++k)
        CHECK(restored.log_weights[k] == w.log_weights[k]);
}

TEST_CASE("calibration result serialization carries provenance") {
    auto inst = gen_mnpp({2, 2, {3.0, 5.0}, 0});
    CalibrationConfig cfg;
    cfg.beta = 0.5;
    cfg.eta = 0.5;
    cfg.exact_weights = true;
    cfg.v_cut = 2;
    cfg.seed = 123;
    auto result = calibrate_m(inst, cfg);
    const Json j = calibration_to_json(cfg, result);
    CHECK(j.at("status") == "ok");
    CHECK(j.at("config").at("seed") == 123);
    CHECK(j.at("config").at("e_f") == "inf");
    CHECK(j.at("diagnostics").contains("log_b_low"));
    // E_f = inf means an empty high side; JSON cannot carry -inf as a number.
    CHECK(j.at("diagnostics").at("log_b_high") == "-inf");
    CHECK(j.at("m_star").get<double>() == *result.m_star);
}

TEST_CASE("report json") {
    auto inst = gen_mnpp({2, 2, {3.0, 5.0}, 0});
    GibbsExact gibbs(build_qubo(inst, 5.0), 1.0);
    auto report = gibbs.sample(64, 5);
    const Json j = report_to_json(report, true);
    CHECK(j.at("count") == 64);
    CHECK(j.at("samples").size() == 64);
    const std::string bits = j.at("samples")[0].at("x").get<std::string>();
    CHECK(bits.size() == 4);
}

TEST_CASE("csv number formatting uses 12 significant digits") {
    CHECK(csv_number(1.0) == "1");
    CHECK(csv_number(0.3333333333333333) == "0.333333333333");
    CHECK(csv_number(123456789012345.0) == "1.23456789012e+14");
}

TEST_CASE("file io errors") {
    CHECK_THROWS_AS(load_json("/nonexistent/path/x.json"), std::runtime_error);
    Json j;
    j["x"] = 1;
    CHECK_THROWS_AS(save_json(j, "/nonexistent/dir/x.json"), std::runtime_error);
    const std::string path = "/tmp/bigm_test_io.json";
    save_json(j, path);
    CHECK(load_json(path) == j);
    std::remove(path.c_str());
}
