// Command-line driver wiring generate -> calibrate -> solve -> validate ->
// sweep workflows with reproducible seeds and machine-readable outputs.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bigm/calibrator.hpp"
#include "bigm/degeneracy.hpp"
#include "bigm/generators.hpp"
#include "bigm/serialization.hpp"
#include "bigm/solvers.hpp"
#include "bigm/spectral.hpp"

namespace {

using namespace bigm;

constexpr int kExitOk = 0;
constexpr int kExitNoSolution = 2;
constexpr int kExitUsage = 3;
constexpr int kExitIo = 4;
constexpr int kExitCap = 5;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_ef(const std::string& text, std::size_t n) {
    if (text == "inf" || text.empty()) return std::numeric_limits<double>::infinity();
    if (text.rfind("alpha:", 0) == 0) {
        const double alpha = std::stod(text.substr(6));
        return alpha * static_cast<double>(n) * static_cast<double>(n);
    }
    return std::stod(text);
}

std::vector<double> parse_grid(const std::string& text) {
    // "lo:hi:steps" -> geometric grid; a plain comma list is taken verbatim.
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        double lo, hi;
        int steps;
        char c1, c2;
        std::istringstream in(text);
        if (!(in >> lo >> c1 >> hi >> c2 >> steps) || c1 != ':' || c2 != ':' || steps < 2 ||
            lo <= 0.0 || hi <= lo)
            throw UsageError("grid must be lo:hi:steps with 0 < lo < hi and steps >= 2");
        const double ratio = std::pow(hi / lo, 1.0 / (steps - 1));
        double m = lo;
        for (int s = 0; s < steps; ++s, m *= ratio) grid.push_back(m);
        return grid;
    }
    std::stringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) grid.push_back(std::stod(cell));
    if (grid.empty()) throw UsageError("empty grid");
    return grid;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) values.push_back(std::stod(cell));
    return values;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

ProblemInstance load_instance(const std::string& path) {
    return instance_from_json(load_json(path));
}

struct WilsonInterval {
    double low;
    double high;
};

WilsonInterval wilson_95(double p, std::size_t n) {
    const double z = 1.959963984540054;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / static_cast<double>(n);
    const double center = (p + z2 / (2.0 * static_cast<double>(n))) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / static_cast<double>(n) +
                      z2 / (4.0 * static_cast<double>(n) * static_cast<double>(n))) /
        denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// ---------------------------------------------------------------- generate

int run_generate(const std::string& family, const std::string& out, std::uint64_t seed,
                 std::int64_t n_items, std::int64_t parts, const std::string& values_csv,
                 bool large, const std::string& layout, std::int64_t cities, double radius,
                 double side, const std::string& file, const std::string& prices,
                 std::int64_t assets, std::int64_t bits, double gamma) {
    std::optional<ProblemInstance> inst;
    if (family == "mnpp") {
        MnppSpec spec;
        if (large) {
            spec = MnppSpec::large_scale(parts, seed);
        } else {
            spec.items = n_items;
            spec.parts = parts;
            spec.seed = seed;
        }
        if (!values_csv.empty()) spec.values = parse_list(values_csv);
        inst = gen_mnpp(spec);
    } else if (family == "tsp") {
        if (layout == "circle") {
            inst = gen_tsp_circle(cities, radius);
        } else if (layout == "random") {
            inst = gen_tsp_random(cities, side, seed);
        } else if (layout == "file") {
            if (file.empty()) throw UsageError("tsp --layout file needs --file");
            inst = gen_tsp(parse_tsplib(read_file(file)));
        } else {
            throw UsageError("unknown tsp layout '" + layout + "'");
        }
    } else if (family == "po") {
        PoSpec spec;
        spec.bits = bits;
        spec.risk_aversion = gamma;
        spec.seed = seed;
        if (!prices.empty()) {
            const PriceHistory history = parse_price_csv(read_file(prices));
            const ReturnStatistics stats = returns_from_prices(history);
            spec.assets = static_cast<std::int64_t>(history.assets.size());
            spec.mu = stats.mean;
            spec.sigma = stats.covariance;
        } else {
            spec = synthetic_po_spec(assets, bits, gamma, seed);
        }
        inst = gen_po(spec);
    } else {
        throw UsageError("unknown family '" + family + "'");
    }

    save_json(instance_to_json(*inst), out);
    std::cout << "family=" << family_name(inst->family()) << " n=" << inst->num_vars()
              << " m=" << inst->num_constraints();
    const CountValue f = feasible_count(*inst);
    if (f.exact) {
        std::cout << " feasible=" << *f.exact;
    } else {
        std::cout << " log_feasible=" << csv_number(f.log_value);
    }
    std::cout << " -> " << out << "\n";
    return kExitOk;
}

// --------------------------------------------------------------- calibrate

CalibrationConfig make_config(const ProblemInstance& inst, double beta, double eta,
                              const std::string& ef_text, std::int64_t v_cut,
                              std::int64_t n_samples, double delta, bool practical,
                              bool exact_weights, bool auto_reduce, std::uint64_t seed) {
    CalibrationConfig cfg;
    cfg.beta = beta;
    cfg.eta = eta;
    cfg.e_f = parse_ef(ef_text, inst.num_vars());
    cfg.v_cut = v_cut;
    cfg.n_samples = n_samples;
    cfg.delta = delta;
    cfg.delta_mode = practical ? DeltaMode::practical : DeltaMode::guaranteed;
    cfg.exact_weights = exact_weights;
    cfg.auto_reduce_eta = auto_reduce;
    cfg.seed = seed;
    return cfg;
}

int run_calibrate(const std::string& instance_path, const std::string& out, double beta,
                  double eta, const std::string& ef_text, std::int64_t v_cut,
                  std::int64_t n_samples, double delta, bool practical, bool exact_weights,
                  bool auto_reduce, std::optional<double> fixed_m,
                  const std::string& vcut_sweep, const std::string& ef_sweep,
                  std::uint64_t seed) {
    const ProblemInstance inst = load_instance(instance_path);
    const CalibrationConfig cfg = make_config(inst, beta, eta, ef_text, v_cut, n_samples, delta,
                                              practical, exact_weights, auto_reduce, seed);

    if (!vcut_sweep.empty()) {
        std::int64_t lo, hi;
        char c;
        std::istringstream in(vcut_sweep);
        if (!(in >> lo >> c >> hi) || c != ':' || lo < 1 || hi < lo)
            throw UsageError("--vcut-sweep needs lo:hi with 1 <= lo <= hi");
        std::ostringstream csv;
        csv << "v_cut,m_star,eta_used,eta_exist,status\n";
        for (std::int64_t v = lo; v <= hi; ++v) {
            CalibrationConfig c_v = cfg;
            c_v.v_cut = v;
            const CalibrationResult r = calibrate_m(inst, c_v);
            csv << v << ',' << (r.m_star ? csv_number(*r.m_star) : "") << ','
                << csv_number(r.eta_used) << ',' << csv_number(r.eta_exist_value) << ','
                << status_name(r.status) << '\n';
        }
        write_text(out, csv.str());
        std::cout << "v_cut sweep " << lo << ".." << hi << " -> " << out << "\n";
        return kExitOk;
    }

    if (!ef_sweep.empty()) {
        double lo, hi;
        int steps;
        char c1, c2;
        std::istringstream in(ef_sweep);
        if (!(in >> lo >> c1 >> hi >> c2 >> steps) || c1 != ':' || c2 != ':' || steps < 2)
            throw UsageError("--ef-sweep needs lo:hi:steps");
        std::ostringstream csv;
        csv << "e_f,m_star,eta_used,eta_exist,status\n";
        for (int s = 0; s < steps; ++s) {
            const double e_f = lo + (hi - lo) * s / (steps - 1);
            CalibrationConfig c_e = cfg;
            c_e.e_f = e_f;
            c_e.auto_reduce_eta = true;
            CalibrationResult r;
            try {
                r = calibrate_m(inst, c_e);
            } catch (const NoFeasibleTarget&) {
                csv << csv_number(e_f) << ",,,,no_feasible_target\n";
                continue;
            }
            csv << csv_number(e_f) << ',' << (r.m_star ? csv_number(*r.m_star) : "") << ','
                << csv_number(r.eta_used) << ',' << csv_number(r.eta_exist_value) << ','
                << status_name(r.status) << '\n';
        }
        write_text(out, csv.str());
        std::cout << "E_f sweep -> " << out << "\n";
        return kExitOk;
    }

    if (fixed_m) {
        const BetaCalibrationResult r = calibrate_beta(inst, cfg, *fixed_m);
        Json j;
        j["status"] = status_name(r.status);
        if (r.beta_star) j["beta_star"] = *r.beta_star;
        j["eta"] = cfg.eta;
        j["m_fixed"] = *fixed_m;
        save_json(j, out);
        if (r.beta_star) {
            std::cout << "status=" << status_name(r.status)
                      << " beta_star=" << csv_number(*r.beta_star) << " -> " << out << "\n";
            return kExitOk;
        }
        std::cout << "status=no_solution (no certified beta in range) -> " << out << "\n";
        return kExitNoSolution;
    }

    const CalibrationResult result = calibrate_m(inst, cfg);
    save_json(calibration_to_json(cfg, result), out);
    std::cout << "status=" << status_name(result.status);
    if (result.m_star) std::cout << " m_star=" << csv_number(*result.m_star);
    std::cout << " eta_used=" << csv_number(result.eta_used)
              << " eta_exist=" << csv_number(result.eta_exist_value) << " -> " << out << "\n";
    return result.status == CalibrationStatus::no_solution ? kExitNoSolution : kExitOk;
}

// ------------------------------------------------------------------- solve

SolveReport run_solver(const ProblemInstance& inst, const std::string& solver, double m,
                       double beta, std::size_t count, double e_f, std::uint64_t seed,
                       int stages, int sweeps) {
    const QuboReformulation reform = build_qubo(inst, m);
    if (solver == "gibbs") {
        return GibbsExact(reform, beta).sample(count, seed, e_f);
    }
    if (solver == "sa") {
        const SaSchedule schedule = make_geometric_schedule(reform, beta, stages, sweeps);
        return simulated_annealing(reform, schedule, count, seed, e_f);
    }
    throw UsageError("unknown solver '" + solver + "' (gibbs | sa)");
}

double resolve_m(const std::optional<double>& m_flag, const std::string& calibration_path) {
    if (m_flag) return *m_flag;
    if (calibration_path.empty()) throw UsageError("need --m or --calibration");
    const Json j = load_json(calibration_path);
    if (!j.contains("m_star"))
        throw std::runtime_error("calibration file has no m_star (status " +
                                 j.value("status", std::string("?")) + ")");
    return j.at("m_star").get<double>();
}

int run_solve(const std::string& instance_path, const std::string& out,
              const std::optional<double>& m_flag, const std::string& calibration_path,
              const std::string& solver, double beta, std::size_t count,
              const std::string& ef_text, std::uint64_t seed, int stages, int sweeps,
              bool include_samples, const std::string& format) {
    const ProblemInstance inst = load_instance(instance_path);
    const double m = resolve_m(m_flag, calibration_path);
    const double e_f = parse_ef(ef_text, inst.num_vars());
    const SolveReport report = run_solver(inst, solver, m, beta, count, e_f, seed, stages, sweeps);

    if (format == "csv") {
        std::ostringstream csv;
        csv << "instance,n,solver,m,beta,e_f,count,eta_eff,mean_feasible_objective,best_total\n";
        csv << instance_path << ',' << inst.num_vars() << ',' << solver << ',' << csv_number(m)
            << ',' << csv_number(beta) << ',' << (std::isinf(e_f) ? "inf" : csv_number(e_f))
            << ',' << count << ',' << csv_number(report.eta_eff) << ','
            << csv_number(report.mean_feasible_objective) << ','
            << csv_number(report.best_total) << '\n';
        write_text(out, csv.str());
    } else {
        save_json(report_to_json(report, include_samples), out);
    }
    std::cout << "eta_eff=" << csv_number(report.eta_eff)
              << " best=" << csv_number(report.best_total) << " -> " << out << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- validate

int run_validate(const std::string& instance_path, const std::string& out, double beta,
                 const std::string& etas_csv, const std::string& ef_text,
                 const std::string& solver, std::size_t count, std::int64_t v_cut,
                 std::int64_t n_samples, bool exact_weights, std::uint64_t seed, int stages,
                 int sweeps) {
    const ProblemInstance inst = load_instance(instance_path);
    const double e_f = parse_ef(ef_text, inst.num_vars());
    const std::vector<double> etas = parse_list(etas_csv);

    std::ostringstream csv;
    csv << "eta_target,m_star,status,eta_eff,ci_low,ci_high\n";
    for (const double eta : etas) {
        CalibrationConfig cfg = make_config(inst, beta, eta, ef_text, v_cut, n_samples, 0.0,
                                            false, exact_weights, true, seed);
        const CalibrationResult r = calibrate_m(inst, cfg);
        if (!r.m_star) {
            csv << csv_number(eta) << ",,no_solution,,,\n";
            continue;
        }
        const SolveReport report =
            run_solver(inst, solver, *r.m_star, beta, count, e_f, seed, stages, sweeps);
        const WilsonInterval ci = wilson_95(report.eta_eff, count);
        csv << csv_number(eta) << ',' << csv_number(*r.m_star) << ',' << status_name(r.status)
            << ',' << csv_number(report.eta_eff) << ',' << csv_number(ci.low) << ','
            << csv_number(ci.high) << '\n';
    }
    write_text(out, csv.str());
    std::cout << "validated " << etas.size() << " targets -> " << out << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------- sweep

int run_sweep(const std::string& instance_path, const std::string& out, double beta,
              const std::string& m_grid, bool calibrated, const std::string& etas_csv,
              const std::string& ef_text, const std::string& solver, std::size_t count,
              int reps, std::int64_t v_cut, std::int64_t n_samples, bool exact_weights,
              std::uint64_t seed, int stages, int sweeps) {
    const ProblemInstance inst = load_instance(instance_path);
    const double e_f = parse_ef(ef_text, inst.num_vars());

    struct Row {
        double m = 0.0;
        double m_l1 = 0.0;
        std::string eta_target; // empty when the grid is explicit
        std::string status;
        double speedup = 0.0;
        bool has_speedup = false;
        bool has_m = false;
    };
    std::vector<Row> rows;
    if (calibrated) {
        for (const double eta : parse_list(etas_csv)) {
            CalibrationConfig cfg = make_config(inst, beta, eta, ef_text, v_cut, n_samples, 0.0,
                                                false, exact_weights, true, seed);
            Row row;
            row.eta_target = csv_number(eta);
            row.m_l1 = big_m_l1(inst, beta, eta);
            try {
                const CalibrationResult r = calibrate_m(inst, cfg);
                row.status = status_name(r.status);
                if (r.m_star) {
                    row.m = *r.m_star;
                    row.has_m = true;
                    if (*r.m_star > 0.0) {
                        row.speedup = speedup_metric(row.m_l1, *r.m_star);
                        row.has_speedup = true;
                    }
                }
            } catch (const NoFeasibleTarget&) {
                row.status = "no_feasible_target";
            }
            rows.push_back(row);
        }
    } else {
        if (m_grid.empty()) throw UsageError("sweep needs --m-grid or --calibrated");
        const double m_l1_mid = big_m_l1(inst, beta, 0.5);
        for (const double m : parse_grid(m_grid)) {
            Row row;
            row.m = m;
            row.m_l1 = m_l1_mid;
            row.has_m = true;
            row.status = "grid";
            rows.push_back(row);
        }
    }

    std::ostringstream csv;
    csv << "instance,family,n,solver,beta,e_f,eta_target,m,m_l1,repetition,count,"
           "eta_eff,ci_low,ci_high,mean_feasible_objective,best_total,speedup,status\n";
    Rng rep_seeder(seed);
    for (const Row& row : rows) {
        for (int rep = 0; rep < reps; ++rep) {
            std::string cells;
            if (row.has_m) {
                try {
                    const SolveReport report =
                        run_solver(inst, solver, row.m, beta, count, e_f,
                                   rep_seeder.fork(static_cast<std::uint64_t>(rep)).next_u64(),
                                   stages, sweeps);
                    const WilsonInterval ci = wilson_95(report.eta_eff, count);
                    std::ostringstream line;
                    line << csv_number(report.eta_eff) << ',' << csv_number(ci.low) << ','
                         << csv_number(ci.high) << ','
                         << csv_number(report.mean_feasible_objective) << ','
                         << csv_number(report.best_total) << ','
                         << (row.has_speedup ? csv_number(row.speedup) : "") << ','
                         << row.status;
                    cells = line.str();
                } catch (const std::exception& e) {
                    // Partial failures are recorded per row; the sweep continues.
                    cells = ",,,,," + std::string(",error: ") + e.what();
                }
            } else {
                cells = ",,,,," + std::string(",") + row.status;
            }
            csv << instance_path << ',' << family_name(inst.family()) << ',' << inst.num_vars()
                << ',' << solver << ',' << csv_number(beta) << ','
                << (std::isinf(e_f) ? "inf" : csv_number(e_f)) << ',' << row.eta_target << ','
                << (row.has_m ? csv_number(row.m) : "") << ',' << csv_number(row.m_l1) << ','
                << rep << ',' << count << ',' << cells << '\n';
        }
    }
    write_text(out, csv.str());
    std::cout << "sweep: " << rows.size() << " weights x " << reps << " repetitions -> " << out
              << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Penalty-weight calibration toolkit for QUBO reformulations"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string out;
    std::string format = "json";
    app.add_option("--seed", seed, "Global random seed")->capture_default_str();
    app.add_option("--out", out, "Output path (command-specific default)");
    app.add_option("--format", format, "Output format: json | csv")
        ->check(CLI::IsMember({"json", "csv"}));

    // generate
    auto* generate = app.add_subcommand("generate", "Generate a problem instance");
    std::string family;
    generate->add_option("family", family, "mnpp | tsp | po")->required();
    std::int64_t g_n = 4, g_p = 3, g_cities = 4, g_assets = 4, g_bits = 3;
    std::string g_values, g_layout = "circle", g_file, g_prices;
    double g_radius = 1e6, g_side = 2e6, g_gamma = 1.0;
    bool g_large = false;
    generate->add_option("--n", g_n, "MNPP item count N");
    generate->add_option("--p", g_p, "MNPP partition count P");
    generate->add_option("--values", g_values, "MNPP values as a comma list");
    generate->add_flag("--large", g_large, "MNPP large-scale sizing (N = 8P)");
    generate->add_option("--layout", g_layout, "TSP layout: circle | random | file");
    generate->add_option("--nv", g_cities, "TSP city count");
    generate->add_option("--radius", g_radius, "TSP circle radius");
    generate->add_option("--side", g_side, "TSP random square side");
    generate->add_option("--file", g_file, "TSPLIB file path");
    generate->add_option("--prices", g_prices, "PO price history CSV");
    generate->add_option("--n-assets", g_assets, "PO synthetic asset count");
    generate->add_option("--w", g_bits, "PO bits per integer variable");
    generate->add_option("--gamma", g_gamma, "PO risk aversion");

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "Determine the penalty weight M");
    std::string c_instance, c_ef = "inf", c_vcut_sweep, c_ef_sweep;
    double c_beta = 1.0, c_eta = 0.5, c_delta = 0.0;
    std::int64_t c_vcut = 0, c_ns = 20000;
    bool c_practical = false, c_exact = false, c_auto = false;
    std::optional<double> c_fixed_m;
    calibrate->add_option("--instance", c_instance, "Instance JSON")->required();
    calibrate->add_option("--beta", c_beta, "Inverse temperature")->capture_default_str();
    calibrate->add_option("--eta", c_eta, "Target success probability")->capture_default_str();
    calibrate->add_option("--ef", c_ef, "Energy threshold: inf | alpha:<v> | <number>");
    calibrate->add_option("--vcut", c_vcut, "Degeneracy cut-off (0 = family default)");
    calibrate->add_option("--ns", c_ns, "Feasible sample count")->capture_default_str();
    calibrate->add_option("--delta", c_delta, "Bin width (0 = automatic)");
    calibrate->add_flag("--practical", c_practical, "Skip the guaranteed-mode delta floor");
    calibrate->add_flag("--exact-weights", c_exact, "Enumerate F instead of sampling");
    calibrate->add_flag("--auto-reduce", c_auto, "Retry with eta = eta_exist - 0.01");
    calibrate->add_option("--fixed-m", c_fixed_m,
                          "Solve the inverse problem: calibrate beta at this M");
    calibrate->add_option("--vcut-sweep", c_vcut_sweep, "lo:hi sweep over v_cut (CSV out)");
    calibrate->add_option("--ef-sweep", c_ef_sweep, "lo:hi:steps sweep over E_f (CSV out)");

    // solve
    auto* solve = app.add_subcommand("solve", "Run a solver on a reformulation");
    std::string s_instance, s_calibration, s_solver = "gibbs", s_ef = "inf";
    std::optional<double> s_m;
    double s_beta = 1.0;
    std::size_t s_count = 1000;
    int s_stages = 100, s_sweeps = 1;
    bool s_samples = false;
    solve->add_option("--instance", s_instance, "Instance JSON")->required();
    solve->add_option("--m", s_m, "Penalty weight");
    solve->add_option("--calibration", s_calibration, "Calibration result JSON providing M");
    solve->add_option("--solver", s_solver, "gibbs | sa")->capture_default_str();
    solve->add_option("--beta", s_beta, "Inverse temperature")->capture_default_str();
    solve->add_option("--count", s_count, "Sample count")->capture_default_str();
    solve->add_option("--ef", s_ef, "Energy threshold for eta_eff");
    solve->add_option("--stages", s_stages, "SA temperature stages");
    solve->add_option("--sweeps", s_sweeps, "SA sweeps per stage");
    solve->add_flag("--include-samples", s_samples, "Embed raw samples in the JSON report");

    // validate
    auto* validate = app.add_subcommand("validate", "Calibrate and measure eta_eff per target");
    std::string v_instance, v_etas = "0.25,0.5,0.75", v_ef = "inf", v_solver = "gibbs";
    double v_beta = 1.0;
    std::size_t v_count = 1000;
    std::int64_t v_vcut = 0, v_ns = 20000;
    bool v_exact = false;
    int v_stages = 100, v_sweeps = 1;
    validate->add_option("--instance", v_instance, "Instance JSON")->required();
    validate->add_option("--beta", v_beta, "Inverse temperature")->capture_default_str();
    validate->add_option("--etas", v_etas, "Comma list of target probabilities")
        ->capture_default_str();
    validate->add_option("--ef", v_ef, "Energy threshold");
    validate->add_option("--solver", v_solver, "gibbs | sa")->capture_default_str();
    validate->add_option("--count", v_count, "Samples per target")->capture_default_str();
    validate->add_option("--vcut", v_vcut, "Degeneracy cut-off (0 = family default)");
    validate->add_option("--ns", v_ns, "Feasible sample count");
    validate->add_flag("--exact-weights", v_exact, "Enumerate F instead of sampling");
    validate->add_option("--stages", v_stages, "SA temperature stages");
    validate->add_option("--sweeps", v_sweeps, "SA sweeps per stage");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Emit plot-ready CSV over an M grid");
    std::string w_instance, w_grid, w_etas = "0.5", w_ef = "inf", w_solver = "gibbs";
    double w_beta = 1.0;
    std::size_t w_count = 1000;
    int w_reps = 1, w_stages = 100, w_sweeps = 1;
    std::int64_t w_vcut = 0, w_ns = 20000;
    bool w_calibrated = false, w_exact = false;
    sweep->add_option("--instance", w_instance, "Instance JSON")->required();
    sweep->add_option("--beta", w_beta, "Inverse temperature")->capture_default_str();
    sweep->add_option("--m-grid", w_grid, "lo:hi:steps geometric grid or comma list");
    sweep->add_flag("--calibrated", w_calibrated, "Use calibrated M per eta target");
    sweep->add_option("--etas", w_etas, "Targets for --calibrated")->capture_default_str();
    sweep->add_option("--ef", w_ef, "Energy threshold");
    sweep->add_option("--solver", w_solver, "gibbs | sa")->capture_default_str();
    sweep->add_option("--count", w_count, "Samples per row")->capture_default_str();
    sweep->add_option("--reps", w_reps, "Repetitions per weight")->capture_default_str();
    sweep->add_option("--vcut", w_vcut, "Degeneracy cut-off (0 = family default)");
    sweep->add_option("--ns", w_ns, "Feasible sample count");
    sweep->add_flag("--exact-weights", w_exact, "Enumerate F instead of sampling");
    sweep->add_option("--stages", w_stages, "SA temperature stages");
    sweep->add_option("--sweeps", w_sweeps, "SA sweeps per stage");

    // Global flags (--seed, --out, --format) may appear after the subcommand.
    for (auto* sub : {generate, calibrate, solve, validate, sweep}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (generate->parsed()) {
            if (out.empty()) out = "instance.json";
            return run_generate(family, out, seed, g_n, g_p, g_values, g_large, g_layout,
                                g_cities, g_radius, g_side, g_file, g_prices, g_assets, g_bits,
                                g_gamma);
        }
        if (calibrate->parsed()) {
            if (out.empty())
                out = (!c_vcut_sweep.empty() || !c_ef_sweep.empty()) ? "calibration.csv"
                                                                     : "calibration.json";
            return run_calibrate(c_instance, out, c_beta, c_eta, c_ef, c_vcut, c_ns, c_delta,
                                 c_practical, c_exact, c_auto, c_fixed_m, c_vcut_sweep,
                                 c_ef_sweep, seed);
        }
        if (solve->parsed()) {
            if (out.empty()) out = format == "csv" ? "report.csv" : "report.json";
            return run_solve(s_instance, out, s_m, s_calibration, s_solver, s_beta, s_count,
                             s_ef, seed, s_stages, s_sweeps, s_samples, format);
        }
        if (validate->parsed()) {
            if (out.empty()) out = "validate.csv";
            return run_validate(v_instance, out, v_beta, v_etas, v_ef, v_solver, v_count, v_vcut,
                                v_ns, v_exact, seed, v_stages, v_sweeps);
        }
        if (sweep->parsed()) {
            if (out.empty()) out = "sweep.csv";
            return run_sweep(w_instance, out, w_beta, w_grid, w_calibrated, w_etas, w_ef,
                             w_solver, w_count, w_reps, w_vcut, w_ns, w_exact, seed, w_stages,
                             w_sweeps);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NoFeasibleTarget& e) {
        std::cerr << "status=no_solution (" << e.what() << ")\n";
        return kExitNoSolution;
    } catch (const EnumCapExceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return kExitCap;
    } catch (const Json::exception& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        if (what.find("cannot open") != std::string::npos ||
            what.find("write failed") != std::string::npos) {
            std::cerr << "i/o error: " << what << "\n";
            return kExitIo;
        }
        std::cerr << "error: " << what << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
