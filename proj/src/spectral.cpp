#include "bigm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include "bigm/degeneracy.hpp"
#include "bigm/walker.hpp"

namespace bigm {

namespace {

Bitstring sample_mnpp(const MnppParams& p, Rng& rng) {
    Bitstring x(static_cast<std::size_t>(p.items * p.parts), 0);
    for (std::int64_t i = 0; i < p.items; ++i) {
        const auto part = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(p.parts)));
        x[static_cast<std::size_t>(i * p.parts + part)] = 1;
    }
    return x;
}

Bitstring sample_tsp(const TspParams& p, Rng& rng) {
    const std::int64_t nv = p.cities;
    std::vector<std::int64_t> perm(static_cast<std::size_t>(nv));
    std::iota(perm.begin(), perm.end(), 0);
    for (std::int64_t i = nv - 1; i > 0; --i) {
        const auto j = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(i + 1)));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    Bitstring x(static_cast<std::size_t>(nv * nv), 0);
    for (std::int64_t t = 0; t < nv; ++t)
        x[static_cast<std::size_t>(t * nv + perm[static_cast<std::size_t>(t)])] = 1;
    return x;
}

Bitstring encode_composition(const std::vector<std::int64_t>& units, std::int64_t bits) {
    Bitstring x(units.size() * static_cast<std::size_t>(bits), 0);
    for (std::size_t a = 0; a < units.size(); ++a) {
        for (std::int64_t j = 0; j < bits; ++j) {
            x[a * static_cast<std::size_t>(bits) + static_cast<std::size_t>(j)] =
                static_cast<std::uint8_t>((units[a] >> j) & 1);
        }
    }
    return x;
}

Bitstring sample_po(const PoParams& p, Rng& rng) {
    // Stars and bars: N-1 distinct bar positions among budget + N - 1 slots,
    // sorted; gaps decode to a uniform weak composition of the budget.
    const std::int64_t budget = (std::int64_t{1} << p.bits) - 1;
    const std::int64_t slots = budget + p.assets - 1;
    std::vector<std::int64_t> bars;
    bars.reserve(static_cast<std::size_t>(p.assets - 1));
    // Floyd's algorithm for a uniform (N-1)-subset of {0, ..., slots-1}.
    std::vector<std::int64_t> chosen;
    for (std::int64_t j = slots - (p.assets - 1); j < slots; ++j) {
        const auto t = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(j + 1)));
        if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
            chosen.push_back(t);
        } else {
            chosen.push_back(j);
        }
    }
    bars = std::move(chosen);
    std::sort(bars.begin(), bars.end());

    std::vector<std::int64_t> units(static_cast<std::size_t>(p.assets), 0);
    std::int64_t prev = -1;
    for (std::size_t a = 0; a < bars.size(); ++a) {
        units[a] = bars[a] - prev - 1;
        prev = bars[a];
    }
    units[static_cast<std::size_t>(p.assets - 1)] = slots - 1 - prev;
    return encode_composition(units, p.bits);
}

} // namespace

Bitstring sample_feasible(const ProblemInstance& inst, Rng& rng) {
    switch (inst.family()) {
    case Family::mnpp: return sample_mnpp(*inst.mnpp(), rng);
    case Family::tsp: return sample_tsp(*inst.tsp(), rng);
    case Family::po: return sample_po(*inst.po(), rng);
    case Family::generic:
        throw UnsupportedFamily("sample_feasible: no uniform sampler for generic instances");
    }
    throw std::logic_error("sample_feasible: unreachable");
}

namespace {

SpectralWeights bin_energies(const std::vector<double>& energies, double delta, double e_lb,
                             double log_feasible, std::int64_t n_samples, bool exact) {
    if (!(delta > 0.0)) throw std::invalid_argument("spectral weights: delta must be positive");
    SpectralWeights w;
    w.e_lb = e_lb;
    w.delta = delta;
    w.n_samples = n_samples;
    w.log_feasible_count = log_feasible;
    w.exact = exact;

    double e_max = e_lb;
    std::vector<std::int64_t> counts;
    for (const double e : energies) {
        const double rel = e - e_lb;
        if (rel < -1e-9 * std::max(1.0, std::abs(e_lb)))
            throw InvalidLowerBound("spectral weights: sampled objective below E_LB");
        const auto bin = static_cast<std::int64_t>(std::max(0.0, std::floor(rel / delta)));
        if (static_cast<std::size_t>(bin) >= counts.size())
            counts.resize(static_cast<std::size_t>(bin) + 1, 0);
        ++counts[static_cast<std::size_t>(bin)];
        e_max = std::max(e_max, e);
    }
    w.e_max = e_max;

    // Scale integer counts by |F| / N_s; the lattice stops at the last
    // non-empty bin (the maximal energy sampled).
    const double log_scale = log_feasible - std::log(static_cast<double>(n_samples));
    w.log_weights.assign(counts.size(), kLogZero);
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] > 0)
            w.log_weights[k] = std::log(static_cast<double>(counts[k])) + log_scale;
    }
    return w;
}

} // namespace

SpectralWeights estimate_spectral_weights(const ProblemInstance& inst, std::int64_t n_samples,
                                          double delta, double e_lb, std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("estimate_spectral_weights: need N_s >= 1");
    Rng rng(seed);
    std::vector<double> energies;
    energies.reserve(static_cast<std::size_t>(n_samples));
    for (std::int64_t s = 0; s < n_samples; ++s) {
        energies.push_back(objective_energy(inst, sample_feasible(inst, rng)));
    }
    const CountValue f = feasible_count(inst);
    SpectralWeights w = bin_energies(energies, delta, e_lb, f.log_value, n_samples, false);
    w.seed = seed;
    return w;
}

void for_each_feasible_objective(const ProblemInstance& inst,
                                 const std::function<void(double)>& f, std::uint64_t cap) {
    const CountValue count = feasible_count(inst);
    if (!count.exact || *count.exact > cap)
        throw EnumCapExceeded("feasible enumeration: |F| exceeds cap");

    switch (inst.family()) {
    case Family::mnpp: {
        const auto& p = *inst.mnpp();
        Bitstring x(inst.num_vars(), 0);
        std::vector<std::int64_t> assign(static_cast<std::size_t>(p.items), 0);
        for (std::int64_t i = 0; i < p.items; ++i) x[static_cast<std::size_t>(i * p.parts)] = 1;
        for (;;) {
            f(objective_energy(inst, x));
            std::int64_t i = 0;
            for (; i < p.items; ++i) {
                auto& a = assign[static_cast<std::size_t>(i)];
                x[static_cast<std::size_t>(i * p.parts + a)] = 0;
                a = (a + 1) % p.parts;
                x[static_cast<std::size_t>(i * p.parts + a)] = 1;
                if (a != 0) break;
            }
            if (i == p.items) break;
        }
        return;
    }
    case Family::tsp: {
        const auto& p = *inst.tsp();
        std::vector<std::int64_t> perm(static_cast<std::size_t>(p.cities));
        std::iota(perm.begin(), perm.end(), 0);
        const std::int64_t nv = p.cities;
        do {
            Bitstring x(inst.num_vars(), 0);
            for (std::int64_t t = 0; t < nv; ++t)
                x[static_cast<std::size_t>(t * nv + perm[static_cast<std::size_t>(t)])] = 1;
            f(objective_energy(inst, x));
        } while (std::next_permutation(perm.begin(), perm.end()));
        return;
    }
    case Family::po: {
        const auto& p = *inst.po();
        const std::int64_t budget = (std::int64_t{1} << p.bits) - 1;
        std::vector<std::int64_t> units(static_cast<std::size_t>(p.assets), 0);
        units[0] = budget;
        for (;;) {
            f(objective_energy(inst, encode_composition(units, p.bits)));
            // Next weak composition in colex order.
            if (p.assets == 1) break;
            if (units[0] > 0) {
                --units[0];
                ++units[1];
            } else {
                std::size_t k = 1;
                while (k < units.size() && units[k] == 0) ++k;
                if (k + 1 >= units.size()) break;
                units[0] = units[k] - 1;
                units[k] = 0;
                ++units[k + 1];
            }
        }
        return;
    }
    case Family::generic: {
        for_each_bitstring(inst, [&](std::uint64_t, double obj, std::int64_t pen) {
            if (pen == 0) f(obj);
        });
        return;
    }
    }
}

SpectralWeights exact_spectral_weights(const ProblemInstance& inst, double delta, double e_lb) {
    std::vector<double> energies;
    for_each_feasible_objective(inst, [&](double e) { energies.push_back(e); });
    const CountValue f = feasible_count(inst);
    if (f.exact && *f.exact != energies.size())
        throw std::logic_error("exact_spectral_weights: enumeration count differs from |F|");
    return bin_energies(energies, delta, e_lb, f.log_value,
                        static_cast<std::int64_t>(energies.size()), true);
}

std::int64_t sample_size_for(double eps, double delta_prob) {
    if (!(eps > 0.0 && eps <= 1.0) || !(delta_prob > 0.0 && delta_prob <= 1.0))
        throw std::invalid_argument("sample_size_for: eps and delta must be in (0,1]");
    return static_cast<std::int64_t>(std::ceil(2.0 / (eps * eps * delta_prob * delta_prob)));
}

double delta_floor(const ProblemInstance& inst, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("delta_floor: beta must be positive");
    const double n = static_cast<double>(inst.num_vars());
    const double log_f = feasible_count(inst).log_value;
    const double e_lb = objective_lower_bound_trivial(inst);
    // Upper bound on any energy: |Q|_l1 plus the constant part plus the
    // penalty range (taken M-free).
    const double e_ub = l1_norm(inst) + inst.objective_offset() +
                        static_cast<double>(penalty_upper_bound(inst));
    const double range_term =
        (log_f - n * std::numbers::ln2_v<double>) / beta + (e_ub - e_lb);
    return std::max(std::numbers::ln2_v<double> / (2.0 * beta), range_term);
}

} // namespace bigm
