#include "bigm/solvers.hpp"

#include <algorithm>
#include <cmath>

#include "bigm/logspace.hpp"

namespace bigm {

SolveReport make_report(std::vector<SampleRecord> samples, double e_f) {
    SolveReport report;
    report.samples = std::move(samples);
    report.e_f = e_f;
    if (report.samples.empty()) {
        report.mean_feasible_objective = std::numeric_limits<double>::quiet_NaN();
        report.best_total = std::numeric_limits<double>::quiet_NaN();
        return report;
    }
    std::size_t qualifying = 0;
    std::size_t feasible = 0;
    double feasible_sum = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (const SampleRecord& rec : report.samples) {
        best = std::min(best, rec.energy.total);
        if (rec.energy.penalty == 0) {
            ++feasible;
            feasible_sum += rec.energy.objective;
            if (rec.energy.objective <= e_f) ++qualifying;
        }
    }
    report.eta_eff = static_cast<double>(qualifying) / static_cast<double>(report.samples.size());
    report.mean_feasible_objective = feasible > 0
                                         ? feasible_sum / static_cast<double>(feasible)
                                         : std::numeric_limits<double>::quiet_NaN();
    report.best_total = best;
    return report;
}

double estimate_eta_eff(const SolveReport& report, double e_f) {
    if (report.samples.empty()) throw std::invalid_argument("estimate_eta_eff: empty report");
    std::size_t qualifying = 0;
    for (const SampleRecord& rec : report.samples) {
        if (rec.energy.penalty == 0 && rec.energy.objective <= e_f) ++qualifying;
    }
    return static_cast<double>(qualifying) / static_cast<double>(report.samples.size());
}

GibbsExact::GibbsExact(const QuboReformulation& reform, double beta)
    : inst_(&reform.instance()), m_(reform.penalty_weight()), beta_(beta),
      n_(reform.instance().num_vars()) {
    if (n_ > enumeration_cap())
        throw EnumCapExceeded("GibbsExact: n exceeds the enumeration cap");
    const std::uint64_t total = std::uint64_t{1} << n_;
    objective_.resize(total);
    penalty_.resize(total);
    for_each_bitstring(*inst_, [&](std::uint64_t code, double obj, std::int64_t pen) {
        objective_[code] = obj;
        penalty_[code] = pen;
    });
    // log Z with a max shift over -beta E(x).
    double max_arg = -std::numeric_limits<double>::infinity();
    for (std::uint64_t code = 0; code < total; ++code) {
        const double arg = -beta_ * (objective_[code] + m_ * static_cast<double>(penalty_[code]));
        if (arg > max_arg) max_arg = arg;
    }
    double sum = 0.0;
    for (std::uint64_t code = 0; code < total; ++code) {
        const double arg = -beta_ * (objective_[code] + m_ * static_cast<double>(penalty_[code]));
        sum += std::exp(arg - max_arg);
    }
    log_z_ = max_arg + std::log(sum);
}

double GibbsExact::log_probability(std::uint64_t code) const {
    const double energy = objective_[code] + m_ * static_cast<double>(penalty_[code]);
    return -beta_ * energy - log_z_;
}

double GibbsExact::success_probability(double e_f) const {
    const std::uint64_t total = std::uint64_t{1} << n_;
    double max_arg = -std::numeric_limits<double>::infinity();
    for (std::uint64_t code = 0; code < total; ++code) {
        if (penalty_[code] != 0 || objective_[code] > e_f) continue;
        max_arg = std::max(max_arg, -beta_ * objective_[code]);
    }
    if (std::isinf(max_arg) && max_arg < 0) return 0.0;
    double sum = 0.0;
    for (std::uint64_t code = 0; code < total; ++code) {
        if (penalty_[code] != 0 || objective_[code] > e_f) continue;
        sum += std::exp(-beta_ * objective_[code] - max_arg);
    }
    return std::exp(max_arg + std::log(sum) - log_z_);
}

double GibbsExact::feasibility_probability() const {
    return success_probability(std::numeric_limits<double>::infinity());
}

double GibbsExact::mean_feasible_objective() const {
    const std::uint64_t total = std::uint64_t{1} << n_;
    double max_arg = -std::numeric_limits<double>::infinity();
    for (std::uint64_t code = 0; code < total; ++code) {
        if (penalty_[code] != 0) continue;
        max_arg = std::max(max_arg, -beta_ * objective_[code]);
    }
    if (std::isinf(max_arg) && max_arg < 0)
        return std::numeric_limits<double>::quiet_NaN();
    double weight_sum = 0.0;
    double weighted = 0.0;
    for (std::uint64_t code = 0; code < total; ++code) {
        if (penalty_[code] != 0) continue;
        const double w = std::exp(-beta_ * objective_[code] - max_arg);
        weight_sum += w;
        weighted += w * objective_[code];
    }
    return weighted / weight_sum;
}

std::vector<double> GibbsExact::probabilities() const {
    const std::uint64_t total = std::uint64_t{1} << n_;
    std::vector<double> p(total);
    for (std::uint64_t code = 0; code < total; ++code) p[code] = std::exp(log_probability(code));
    return p;
}

SolveReport GibbsExact::sample(std::size_t count, std::uint64_t seed, double e_f) const {
    const std::uint64_t total = std::uint64_t{1} << n_;
    std::vector<double> cumulative(total);
    double acc = 0.0;
    for (std::uint64_t code = 0; code < total; ++code) {
        acc += std::exp(log_probability(code));
        cumulative[code] = acc;
    }
    cumulative[total - 1] = 1.0; // absorb rounding in the last bucket

    Rng rng(seed);
    std::vector<SampleRecord> samples;
    samples.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        const double u = rng.next_double();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const auto code = static_cast<std::uint64_t>(it - cumulative.begin());
        SampleRecord rec;
        rec.x = bitstring_from_code(code, n_);
        rec.energy.objective = objective_[code];
        rec.energy.penalty = penalty_[code];
        rec.energy.total = objective_[code] + m_ * static_cast<double>(penalty_[code]);
        samples.push_back(std::move(rec));
    }
    return make_report(std::move(samples), e_f);
}

SaSchedule make_geometric_schedule(const QuboReformulation& reform, double beta_target,
                                   int stages, int sweeps_per_stage) {
    if (!(beta_target > 0.0))
        throw std::invalid_argument("make_geometric_schedule: beta must be positive");
    if (stages < 2) throw std::invalid_argument("make_geometric_schedule: need >= 2 stages");
    SaSchedule schedule;
    schedule.stages = stages;
    schedule.sweeps_per_stage = sweeps_per_stage;
    const double t_final = 1.0 / beta_target;
    double t0 = reform.q_total().l1_norm() / std::max<std::size_t>(reform.instance().num_vars(), 1);
    if (t0 <= t_final) t0 = t_final * std::exp(1.0); // keep the schedule cooling
    schedule.t0 = t0;
    schedule.ratio = std::pow(t_final / t0, 1.0 / static_cast<double>(stages - 1));
    return schedule;
}

MetropolisSampler::MetropolisSampler(const QuboReformulation& reform, double temperature, Rng rng)
    : reform_(&reform), walker_(reform.instance()), temperature_(temperature), rng_(rng) {
    if (!(temperature > 0.0))
        throw std::invalid_argument("MetropolisSampler: temperature must be positive");
}

void MetropolisSampler::set_temperature(double t) {
    if (!(t > 0.0)) throw std::invalid_argument("MetropolisSampler: temperature must be positive");
    temperature_ = t;
}

void MetropolisSampler::randomize_state() {
    Bitstring x(reform_->instance().num_vars());
    for (auto& bit : x) bit = static_cast<std::uint8_t>(rng_.next_u64() & 1u);
    walker_.reset(x);
}

void MetropolisSampler::step() {
    const std::size_t n = reform_->instance().num_vars();
    const auto i = static_cast<std::size_t>(rng_.below(n));
    const double delta = walker_.objective_delta(i) +
                         reform_->penalty_weight() *
                             static_cast<double>(walker_.penalty_delta(i));
    if (delta <= 0.0 || rng_.next_double() < std::exp(-delta / temperature_)) {
        walker_.flip(i);
    }
}

double MetropolisSampler::total_energy() const {
    return walker_.objective() +
           reform_->penalty_weight() * static_cast<double>(walker_.penalty());
}

SolveReport simulated_annealing(const QuboReformulation& reform, const SaSchedule& schedule,
                                std::size_t count, std::uint64_t seed, double e_f) {
    if (!(schedule.t0 > 0.0) || !(schedule.ratio > 0.0 && schedule.ratio < 1.0))
        throw std::invalid_argument("simulated_annealing: need t0 > 0 and ratio in (0,1)");
    Rng base(seed);
    std::vector<SampleRecord> samples;
    samples.reserve(count);
    for (std::size_t chain = 0; chain < count; ++chain) {
        MetropolisSampler sampler(reform, schedule.t0, base.fork(chain));
        sampler.randomize_state();
        double t = schedule.t0;
        for (int stage = 0; stage < schedule.stages; ++stage) {
            sampler.set_temperature(t);
            for (int s = 0; s < schedule.sweeps_per_stage; ++s) sampler.sweep();
            t *= schedule.ratio;
        }
        SampleRecord rec;
        rec.x = sampler.state();
        rec.energy = total_energy(reform, rec.x);
        samples.push_back(std::move(rec));
    }
    return make_report(std::move(samples), e_f);
}

BinarySearchResult binary_search_m(
    const ProblemInstance& inst,
    const std::function<double(const QuboReformulation&)>& measure_eta_eff, double eta,
    double m_init, int budget) {
    if (!(m_init > 0.0)) throw std::invalid_argument("binary_search_m: M_init must be positive");
    if (budget < 1) throw std::invalid_argument("binary_search_m: budget must be >= 1");

    BinarySearchResult result;
    double m = m_init;
    double measured = measure_eta_eff(build_qubo(inst, m));
    result.calls = 1;
    if (measured < eta) return result; // already failing at the initial weight
    result.ok = true;
    result.m = m;
    result.eta_eff_at_m = measured;
    while (result.calls < budget) {
        const double candidate = m / 2.0;
        measured = measure_eta_eff(build_qubo(inst, candidate));
        ++result.calls;
        if (measured < eta) break;
        m = candidate;
        result.m = m;
        result.eta_eff_at_m = measured;
    }
    return result;
}

double speedup_metric(double m_l1, double m_star) {
    if (!(m_l1 > 0.0) || !(m_star > 0.0))
        throw std::invalid_argument("speedup_metric: both weights must be positive");
    return std::log2(m_l1 / m_star);
}

} // namespace bigm
