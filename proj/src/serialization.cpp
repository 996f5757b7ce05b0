#include "bigm/serialization.hpp"

#include <cstdio>
#include <fstream>

namespace bigm {

namespace {

Json family_to_json(const ProblemInstance& inst) {
    Json j;
    j["tag"] = family_name(inst.family());
    switch (inst.family()) {
    case Family::mnpp: {
        const auto& p = *inst.mnpp();
        j["items"] = p.items;
        j["parts"] = p.parts;
        j["values"] = p.values;
        break;
    }
    case Family::tsp: {
        const auto& p = *inst.tsp();
        j["cities"] = p.cities;
        j["edges"] = p.edge_weights;
        break;
    }
    case Family::po: {
        const auto& p = *inst.po();
        j["assets"] = p.assets;
        j["bits"] = p.bits;
        j["risk_aversion"] = p.risk_aversion;
        break;
    }
    case Family::generic: break;
    }
    return j;
}

std::pair<Family, FamilyParams> family_from_json(const Json& j) {
    const std::string tag = j.value("tag", "generic");
    if (tag == "mnpp") {
        MnppParams p;
        p.items = j.at("items").get<std::int64_t>();
        p.parts = j.at("parts").get<std::int64_t>();
        p.values = j.at("values").get<std::vector<double>>();
        return {Family::mnpp, p};
    }
    if (tag == "tsp") {
        TspParams p;
        p.cities = j.at("cities").get<std::int64_t>();
        p.edge_weights = j.at("edges").get<std::vector<double>>();
        return {Family::tsp, p};
    }
    if (tag == "po") {
        PoParams p;
        p.assets = j.at("assets").get<std::int64_t>();
        p.bits = j.at("bits").get<std::int64_t>();
        p.risk_aversion = j.at("risk_aversion").get<double>();
        return {Family::po, p};
    }
    return {Family::generic, std::monostate{}};
}

} // namespace

Json instance_to_json(const ProblemInstance& inst) {
    Json j;
    j["n"] = inst.num_vars();
    j["m"] = inst.num_constraints();

    // Q holds the operative quadratic matrix (linear terms already on the
    // diagonal); L records the linear split separately for bound providers.
    Json q = Json::array();
    inst.quad().for_each([&](std::size_t i, std::size_t k, double v) {
        q.push_back(Json::array({i, k, v}));
    });
    j["Q"] = std::move(q);
    j["L"] = inst.linear();
    j["c0"] = inst.objective_offset();

    Json a = Json::array();
    const auto& rows = inst.constraints().rows;
    for (std::size_t row = 0; row < rows.size(); ++row) {
        for (const auto& entry : rows[row]) {
            a.push_back(Json::array({row, entry.col, entry.coeff}));
        }
    }
    j["A"] = std::move(a);
    j["b"] = inst.rhs();
    j["family"] = family_to_json(inst);
    return j;
}

ProblemInstance instance_from_json(const Json& j) {
    const auto n = j.at("n").get<std::size_t>();
    const auto m = j.at("m").get<std::size_t>();

    EnergyMatrix quad(n);
    for (const auto& triplet : j.at("Q")) {
        quad.add(triplet.at(0).get<std::size_t>(), triplet.at(1).get<std::size_t>(),
                 triplet.at(2).get<double>());
    }

    ConstraintMatrix constraints;
    constraints.cols = n;
    constraints.rows.resize(m);
    for (const auto& triplet : j.at("A")) {
        const auto row = triplet.at(0).get<std::size_t>();
        if (row >= m) throw std::invalid_argument("instance_from_json: constraint row out of range");
        constraints.rows[row].push_back(
            {triplet.at(1).get<std::uint32_t>(), triplet.at(2).get<std::int64_t>()});
    }
    auto rhs = j.at("b").get<std::vector<std::int64_t>>();

    auto [family, params] = family_from_json(j.value("family", Json::object()));

    std::vector<double> linear;
    if (j.contains("L")) linear = j.at("L").get<std::vector<double>>();
    return ProblemInstance::from_folded(std::move(quad), std::move(linear), j.value("c0", 0.0),
                                        std::move(constraints), std::move(rhs), family,
                                        std::move(params));
}

Json degeneracy_to_json(const DegeneracyTable& table) {
    Json j;
    switch (table.source) {
    case DegeneracyTable::Source::analytic: j["source"] = "analytic"; break;
    case DegeneracyTable::Source::brute_force: j["source"] = "brute_force"; break;
    case DegeneracyTable::Source::fitted: j["source"] = "fitted"; break;
    }
    j["v_cut"] = table.v_cut;
    Json values = Json::array();
    Json zero_mask = Json::array();
    for (double lv : table.log_values) {
        zero_mask.push_back(is_log_zero(lv));
        values.push_back(is_log_zero(lv) ? 0.0 : lv);
    }
    j["log_values"] = std::move(values);
    j["zero_mask"] = std::move(zero_mask);
    j["extrapolated"] = table.extrapolated;
    return j;
}

DegeneracyTable degeneracy_from_json(const Json& j) {
    DegeneracyTable table;
    const std::string source = j.at("source").get<std::string>();
    if (source == "analytic") table.source = DegeneracyTable::Source::analytic;
    else if (source == "fitted") table.source = DegeneracyTable::Source::fitted;
    else table.source = DegeneracyTable::Source::brute_force;
    table.v_cut = j.at("v_cut").get<std::int64_t>();
    const auto values = j.at("log_values").get<std::vector<double>>();
    const auto zero_mask = j.at("zero_mask").get<std::vector<bool>>();
    if (values.size() != zero_mask.size())
        throw std::invalid_argument("degeneracy_from_json: mask/value length mismatch");
    table.log_values.resize(values.size());
    for (std::size_t v = 0; v < values.size(); ++v)
        table.log_values[v] = zero_mask[v] ? kLogZero : values[v];
    table.extrapolated = j.value("extrapolated", false);
    return table;
}

Json spectral_to_json(const SpectralWeights& w) {
    Json j;
    j["e_lb"] = w.e_lb;
    j["delta"] = w.delta;
    j["e_max"] = w.e_max;
    j["n_samples"] = w.n_samples;
    j["log_feasible_count"] = w.log_feasible_count;
    j["exact"] = w.exact;
    j["seed"] = w.seed;
    Json values = Json::array();
    Json zero_mask = Json::array();
    for (double lv : w.log_weights) {
        zero_mask.push_back(is_log_zero(lv));
        values.push_back(is_log_zero(lv) ? 0.0 : lv);
    }
    j["log_weights"] = std::move(values);
    j["zero_mask"] = std::move(zero_mask);
    return j;
}

SpectralWeights spectral_from_json(const Json& j) {
    SpectralWeights w;
    w.e_lb = j.at("e_lb").get<double>();
    w.delta = j.at("delta").get<double>();
    w.e_max = j.at("e_max").get<double>();
    w.n_samples = j.at("n_samples").get<std::int64_t>();
    w.log_feasible_count = j.at("log_feasible_count").get<double>();
    w.exact = j.value("exact", false);
    w.seed = j.value("seed", std::uint64_t{0});
    const auto values = j.at("log_weights").get<std::vector<double>>();
    const auto zero_mask = j.at("zero_mask").get<std::vector<bool>>();
    if (values.size() != zero_mask.size())
        throw std::invalid_argument("spectral_from_json: mask/value length mismatch");
    w.log_weights.resize(values.size());
    for (std::size_t k = 0; k < values.size(); ++k)
        w.log_weights[k] = zero_mask[k] ? kLogZero : values[k];
    return w;
}

Json calibration_to_json(const CalibrationConfig& cfg, const CalibrationResult& result) {
    Json j;
    j["status"] = status_name(result.status);
    if (result.m_star) j["m_star"] = *result.m_star;
    j["eta_used"] = result.eta_used;
    j["eta_exist"] = result.eta_exist_value;

    Json config;
    config["beta"] = cfg.beta;
    config["eta"] = cfg.eta;
    config["e_f"] = std::isinf(cfg.e_f) ? Json("inf") : Json(cfg.e_f);
    config["v_cut"] = cfg.v_cut;
    config["n_samples"] = cfg.n_samples;
    config["delta"] = cfg.delta;
    config["delta_mode"] = cfg.delta_mode == DeltaMode::guaranteed ? "guaranteed" : "practical";
    config["seed"] = cfg.seed;
    config["exact_weights"] = cfg.exact_weights;
    config["auto_reduce_eta"] = cfg.auto_reduce_eta;
    j["config"] = std::move(config);

    const auto& d = result.diagnostics;
    Json diag;
    diag["delta_used"] = d.delta_used;
    diag["e_lb"] = d.e_lb;
    diag["log_b_low"] = is_log_zero(d.log_b_low) ? Json("-inf") : Json(d.log_b_low);
    diag["log_b_high"] = is_log_zero(d.log_b_high) ? Json("-inf") : Json(d.log_b_high);
    diag["root_iterations"] = d.root_iterations;
    diag["bracket_doublings"] = d.bracket_doublings;
    diag["v_cut_used"] = d.v_cut_used;
    diag["n_samples_used"] = d.n_samples_used;
    diag["spectral_exact"] = d.spectral_exact;
    diag["spectral_truncated"] = d.spectral_truncated;
    diag["delta_floor_applied"] = d.delta_floor_applied;
    switch (d.degeneracy_source) {
    case DegeneracyTable::Source::analytic: diag["degeneracy_source"] = "analytic"; break;
    case DegeneracyTable::Source::brute_force: diag["degeneracy_source"] = "brute_force"; break;
    case DegeneracyTable::Source::fitted: diag["degeneracy_source"] = "fitted"; break;
    }
    diag["notes"] = d.notes;
    j["diagnostics"] = std::move(diag);
    return j;
}

Json report_to_json(const SolveReport& report, bool include_samples) {
    Json j;
    j["count"] = report.samples.size();
    j["e_f"] = std::isinf(report.e_f) ? Json("inf") : Json(report.e_f);
    j["eta_eff"] = report.eta_eff;
    if (std::isnan(report.mean_feasible_objective)) {
        j["mean_feasible_objective"] = nullptr;
    } else {
        j["mean_feasible_objective"] = report.mean_feasible_objective;
    }
    j["best_total"] = report.best_total;
    if (include_samples) {
        Json samples = Json::array();
        for (const SampleRecord& rec : report.samples) {
            Json s;
            std::string bits(rec.x.size(), '0');
            for (std::size_t i = 0; i < rec.x.size(); ++i) bits[i] = rec.x[i] ? '1' : '0';
            s["x"] = bits;
            s["objective"] = rec.energy.objective;
            s["penalty"] = rec.energy.penalty;
            s["total"] = rec.energy.total;
            samples.push_back(std::move(s));
        }
        j["samples"] = std::move(samples);
    }
    return j;
}

std::string csv_number(double value) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

void save_json(const Json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return Json::parse(in);
}

} // namespace bigm
