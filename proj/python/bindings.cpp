// Python bindings for the calibration toolkit: instance generation, energy
// evaluation, penalty-weight calibration and the reference solvers.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <optional>

#include "bigm/calibrator.hpp"
#include "bigm/degeneracy.hpp"
#include "bigm/generators.hpp"
#include "bigm/serialization.hpp"
#include "bigm/solvers.hpp"
#include "bigm/spectral.hpp"

namespace py = pybind11;
using namespace bigm;

namespace {

py::dict result_to_dict(const CalibrationResult& result) {
    py::dict d;
    d["status"] = status_name(result.status);
    d["m_star"] = result.m_star ? py::object(py::float_(*result.m_star)) : py::none();
    d["eta_used"] = result.eta_used;
    d["eta_exist"] = result.eta_exist_value;
    d["delta_used"] = result.diagnostics.delta_used;
    d["e_lb"] = result.diagnostics.e_lb;
    d["log_b_low"] = result.diagnostics.log_b_low;
    d["log_b_high"] = result.diagnostics.log_b_high;
    return d;
}

py::dict report_to_dict(const SolveReport& report, bool include_samples) {
    py::dict d;
    d["eta_eff"] = report.eta_eff;
    d["mean_feasible_objective"] = report.mean_feasible_objective;
    d["best_total"] = report.best_total;
    d["count"] = report.samples.size();
    if (include_samples) {
        py::list samples;
        for (const SampleRecord& rec : report.samples) {
            py::dict s;
            py::list bits;
            for (auto b : rec.x) bits.append(static_cast<int>(b));
            s["x"] = bits;
            s["objective"] = rec.energy.objective;
            s["penalty"] = rec.energy.penalty;
            s["total"] = rec.energy.total;
            samples.append(s);
        }
        d["samples"] = samples;
    }
    return d;
}

CalibrationConfig config_from_kwargs(double beta, double eta, double e_f, std::int64_t v_cut,
                                     std::int64_t n_samples, double delta, bool exact_weights,
                                     bool auto_reduce_eta, bool practical, std::uint64_t seed) {
    CalibrationConfig cfg;
    cfg.beta = beta;
    cfg.eta = eta;
    cfg.e_f = e_f;
    cfg.v_cut = v_cut;
    cfg.n_samples = n_samples;
    cfg.delta = delta;
    cfg.exact_weights = exact_weights;
    cfg.auto_reduce_eta = auto_reduce_eta;
    cfg.delta_mode = practical ? DeltaMode::practical : DeltaMode::guaranteed;
    cfg.seed = seed;
    return cfg;
}

} // namespace

PYBIND11_MODULE(_bigm, m) {
    m.doc() = "Penalty-weight calibration for QUBO reformulations of constrained problems";

    py::class_<ProblemInstance>(m, "ProblemInstance")
        .def_property_readonly("num_vars", &ProblemInstance::num_vars)
        .def_property_readonly("num_constraints", &ProblemInstance::num_constraints)
        .def_property_readonly("family",
                               [](const ProblemInstance& inst) {
                                   return family_name(inst.family());
                               })
        .def("__repr__", [](const ProblemInstance& inst) {
            return "<ProblemInstance " + family_name(inst.family()) + " n=" +
                   std::to_string(inst.num_vars()) + " m=" +
                   std::to_string(inst.num_constraints()) + ">";
        });

    // Generators.
    m.def(
        "gen_mnpp",
        [](std::int64_t items, std::int64_t parts, const std::vector<double>& values,
           std::uint64_t seed) { return gen_mnpp({items, parts, values, seed}); },
        py::arg("items"), py::arg("parts"), py::arg("values") = std::vector<double>{},
        py::arg("seed") = 0);
    m.def("gen_tsp_circle", &gen_tsp_circle, py::arg("cities"), py::arg("radius") = 1e6);
    m.def("gen_tsp_random", &gen_tsp_random, py::arg("cities"), py::arg("side") = 2e6,
          py::arg("seed") = 0);
    m.def(
        "gen_tsp_file",
        [](const std::string& text) { return gen_tsp(parse_tsplib(text)); },
        py::arg("tsplib_text"));
    m.def(
        "gen_po_synthetic",
        [](std::int64_t assets, std::int64_t bits, double risk_aversion, std::uint64_t seed) {
            return gen_po(synthetic_po_spec(assets, bits, risk_aversion, seed));
        },
        py::arg("assets"), py::arg("bits"), py::arg("risk_aversion") = 1.0, py::arg("seed") = 0);
    m.def(
        "gen_po_from_prices",
        [](const std::string& csv_text, std::int64_t bits, double risk_aversion) {
            const PriceHistory history = parse_price_csv(csv_text);
            const ReturnStatistics stats = returns_from_prices(history);
            PoSpec spec;
            spec.assets = static_cast<std::int64_t>(history.assets.size());
            spec.bits = bits;
            spec.risk_aversion = risk_aversion;
            spec.mu = stats.mean;
            spec.sigma = stats.covariance;
            return gen_po(spec);
        },
        py::arg("csv_text"), py::arg("bits") = 3, py::arg("risk_aversion") = 1.0);

    // Serialization.
    m.def("instance_to_json", [](const ProblemInstance& inst) {
        return instance_to_json(inst).dump();
    });
    m.def("instance_from_json", [](const std::string& text) {
        return instance_from_json(Json::parse(text));
    });

    // Energies and direct bounds.
    m.def("objective_energy", &objective_energy, py::arg("instance"), py::arg("x"));
    m.def("penalty_energy", &penalty_energy, py::arg("instance"), py::arg("x"));
    m.def(
        "total_energy",
        [](const ProblemInstance& inst, double m_weight, const Bitstring& x) {
            const auto breakdown = total_energy(build_qubo(inst, m_weight), x);
            py::dict d;
            d["objective"] = breakdown.objective;
            d["penalty"] = breakdown.penalty;
            d["total"] = breakdown.total;
            return d;
        },
        py::arg("instance"), py::arg("m"), py::arg("x"));
    m.def("l1_norm", &l1_norm);
    m.def("big_m_l1", &big_m_l1, py::arg("instance"), py::arg("beta"), py::arg("eta"));
    m.def("penalty_upper_bound", &penalty_upper_bound);
    m.def("objective_lower_bound_trivial", &objective_lower_bound_trivial);

    // Degeneracy and spectral weights.
    m.def(
        "npen_mnpp",
        [](std::int64_t items, std::int64_t parts, std::int64_t v) {
            const CountValue c = npen_mnpp(items, parts, v);
            return py::make_tuple(c.log_value,
                                  c.exact ? py::object(py::int_(*c.exact)) : py::none());
        },
        py::arg("items"), py::arg("parts"), py::arg("v"));
    m.def(
        "npen_tsp",
        [](std::int64_t cities, std::int64_t v) {
            const CountValue c = npen_tsp(cities, v);
            return py::make_tuple(c.log_value,
                                  c.exact ? py::object(py::int_(*c.exact)) : py::none());
        },
        py::arg("cities"), py::arg("v"));
    m.def(
        "npen_po",
        [](std::int64_t assets, std::int64_t bits, std::int64_t v) {
            const CountValue c = npen_po(assets, bits, v);
            return py::make_tuple(c.log_value,
                                  c.exact ? py::object(py::int_(*c.exact)) : py::none());
        },
        py::arg("assets"), py::arg("bits"), py::arg("v"));
    m.def(
        "npen_bruteforce",
        [](const ProblemInstance& inst, std::int64_t v_cut) {
            const DegeneracyTable table = npen_bruteforce(inst, v_cut);
            py::list counts;
            for (std::uint64_t c : table.exact) counts.append(c);
            return counts;
        },
        py::arg("instance"), py::arg("v_cut"));
    m.def(
        "feasible_count",
        [](const ProblemInstance& inst) {
            const CountValue c = feasible_count(inst);
            return py::make_tuple(c.log_value,
                                  c.exact ? py::object(py::int_(*c.exact)) : py::none());
        },
        py::arg("instance"));
    m.def(
        "sample_feasible",
        [](const ProblemInstance& inst, std::uint64_t seed, std::size_t count) {
            Rng rng(seed);
            py::list out;
            for (std::size_t s = 0; s < count; ++s) {
                py::list bits;
                for (auto b : sample_feasible(inst, rng)) bits.append(static_cast<int>(b));
                out.append(bits);
            }
            return out;
        },
        py::arg("instance"), py::arg("seed") = 0, py::arg("count") = 1);
    m.def("sample_size_for", &sample_size_for, py::arg("eps"), py::arg("delta"));
    m.def("delta_floor", &delta_floor, py::arg("instance"), py::arg("beta"));

    // Calibration.
    m.def(
        "calibrate_m",
        [](const ProblemInstance& inst, double beta, double eta, double e_f, std::int64_t v_cut,
           std::int64_t n_samples, double delta, bool exact_weights, bool auto_reduce_eta,
           bool practical, std::uint64_t seed) {
            return result_to_dict(calibrate_m(
                inst, config_from_kwargs(beta, eta, e_f, v_cut, n_samples, delta, exact_weights,
                                         auto_reduce_eta, practical, seed)));
        },
        py::arg("instance"), py::arg("beta"), py::arg("eta"),
        py::arg("e_f") = std::numeric_limits<double>::infinity(), py::arg("v_cut") = 0,
        py::arg("n_samples") = 20000, py::arg("delta") = 0.0, py::arg("exact_weights") = false,
        py::arg("auto_reduce_eta") = false, py::arg("practical") = false, py::arg("seed") = 0);
    m.def(
        "calibrate_beta",
        [](const ProblemInstance& inst, double m_fixed, double eta, double e_f,
           std::int64_t v_cut, std::int64_t n_samples, double delta, bool exact_weights,
           std::uint64_t seed) {
            const BetaCalibrationResult r = calibrate_beta(
                inst,
                config_from_kwargs(1.0, eta, e_f, v_cut, n_samples, delta, exact_weights, false,
                                   true, seed),
                m_fixed);
            py::dict d;
            d["status"] = status_name(r.status);
            d["beta_star"] = r.beta_star ? py::object(py::float_(*r.beta_star)) : py::none();
            return d;
        },
        py::arg("instance"), py::arg("m"), py::arg("eta"),
        py::arg("e_f") = std::numeric_limits<double>::infinity(), py::arg("v_cut") = 0,
        py::arg("n_samples") = 20000, py::arg("delta") = 0.0, py::arg("exact_weights") = false,
        py::arg("seed") = 0);

    // Reference solvers.
    py::class_<GibbsExact>(m, "GibbsExact")
        .def(py::init([](const ProblemInstance& inst, double m_weight, double beta) {
                 return GibbsExact(build_qubo(inst, m_weight), beta);
             }),
             py::arg("instance"), py::arg("m"), py::arg("beta"))
        .def("success_probability", &GibbsExact::success_probability, py::arg("e_f"))
        .def("feasibility_probability", &GibbsExact::feasibility_probability)
        .def("mean_feasible_objective", &GibbsExact::mean_feasible_objective)
        .def("log_partition", &GibbsExact::log_partition)
        .def(
            "sample",
            [](const GibbsExact& gibbs, std::size_t count, std::uint64_t seed, double e_f,
               bool include_samples) {
                return report_to_dict(gibbs.sample(count, seed, e_f), include_samples);
            },
            py::arg("count"), py::arg("seed") = 0,
            py::arg("e_f") = std::numeric_limits<double>::infinity(),
            py::arg("include_samples") = false);

    m.def(
        "simulated_annealing",
        [](const ProblemInstance& inst, double m_weight, double beta_target, std::size_t count,
           std::uint64_t seed, int stages, int sweeps_per_stage, double e_f,
           bool include_samples) {
            const auto reform = build_qubo(inst, m_weight);
            const SaSchedule schedule =
                make_geometric_schedule(reform, beta_target, stages, sweeps_per_stage);
            return report_to_dict(simulated_annealing(reform, schedule, count, seed, e_f),
                                  include_samples);
        },
        py::arg("instance"), py::arg("m"), py::arg("beta_target"), py::arg("count") = 128,
        py::arg("seed") = 0, py::arg("stages") = 100, py::arg("sweeps_per_stage") = 1,
        py::arg("e_f") = std::numeric_limits<double>::infinity(),
        py::arg("include_samples") = false);

    m.def("speedup_metric", &speedup_metric, py::arg("m_l1"), py::arg("m_star"));

    py::register_exception<NoFeasibleTarget>(m, "NoFeasibleTargetError");
    py::register_exception<EnumCapExceeded>(m, "EnumCapExceededError");
    py::register_exception<UnsupportedFamily>(m, "UnsupportedFamilyError");
}
