#include "bigm/degeneracy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "bigm/rng.hpp"
#include "bigm/walker.hpp"

namespace bigm {

namespace {

using u128 = unsigned __int128;
constexpr u128 kU64Max = std::numeric_limits<std::uint64_t>::max();

std::optional<u128> checked_mul(u128 a, u128 b) {
    if (a == 0 || b == 0) return u128{0};
    const u128 prod = a * b;
    if (prod / a != b) return std::nullopt;
    return prod;
}

std::optional<u128> checked_add(u128 a, u128 b) {
    const u128 sum = a + b;
    if (sum < a) return std::nullopt;
    return sum;
}

std::optional<u128> checked_pow(u128 base, std::int64_t exp) {
    u128 acc = 1;
    for (std::int64_t i = 0; i < exp; ++i) {
        auto next = checked_mul(acc, base);
        if (!next) return std::nullopt;
        acc = *next;
    }
    return acc;
}

std::optional<u128> checked_binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) return u128{0};
    k = std::min(k, n - k);
    u128 acc = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        auto next = checked_mul(acc, static_cast<u128>(n - k + i));
        if (!next) return std::nullopt;
        acc = *next / static_cast<u128>(i);
    }
    return acc;
}

std::optional<u128> checked_factorial(std::int64_t n) {
    u128 acc = 1;
    for (std::int64_t i = 2; i <= n; ++i) {
        auto next = checked_mul(acc, static_cast<u128>(i));
        if (!next) return std::nullopt;
        acc = *next;
    }
    return acc;
}

double log_u128(u128 v) {
    if (v == 0) return kLogZero;
    const auto hi = static_cast<std::uint64_t>(v >> 64);
    const auto lo = static_cast<std::uint64_t>(v);
    if (hi == 0) return std::log(static_cast<double>(lo));
    return std::log(static_cast<double>(hi) * 0x1.0p64 + static_cast<double>(lo));
}

double log_binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) return kLogZero;
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

double log_factorial(std::int64_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

CountValue from_u128(std::optional<u128> v, double log_fallback) {
    CountValue out;
    if (v) {
        out.log_value = log_u128(*v);
        if (*v <= kU64Max) out.exact = static_cast<std::uint64_t>(*v);
        return out;
    }
    out.log_value = log_fallback;
    return out;
}

} // namespace

CountValue CountValue::from_u64(std::uint64_t v) {
    CountValue out;
    out.exact = v;
    out.log_value = v == 0 ? kLogZero : std::log(static_cast<double>(v));
    return out;
}

CountValue npen_mnpp(std::int64_t items, std::int64_t parts, std::int64_t v) {
    if (items < 1 || parts < 2) throw std::invalid_argument("npen_mnpp: invalid instance size");
    if (v < 0 || v > 7)
        throw UnsupportedDegeneracy("npen_mnpp: closed form derived for v <= 7 only");
    if (v == 0) return from_u128(checked_pow(static_cast<u128>(parts), items),
                                 static_cast<double>(items) * std::log(static_cast<double>(parts)));

    // Per-row miscounts: a row with zero or two ones adds 1, three ones adds 4.
    const std::int64_t row_ways_v1 = 1 + parts * (parts - 1) / 2; // 1 + C(P,2)
    const auto term = [&](std::int64_t rows_wrong, std::int64_t power) -> std::optional<u128> {
        auto choose = checked_binomial(items, rows_wrong);
        if (!choose || *choose == 0) return u128{0};
        auto rest = checked_pow(static_cast<u128>(parts), items - rows_wrong);
        auto ways = checked_pow(static_cast<u128>(row_ways_v1), power);
        if (!rest || !ways) return std::nullopt;
        auto prod = checked_mul(*choose, *rest);
        if (!prod) return std::nullopt;
        return checked_mul(*prod, *ways);
    };
    const auto log_term = [&](std::int64_t rows_wrong, std::int64_t power) -> double {
        const double lc = log_binomial(items, rows_wrong);
        if (is_log_zero(lc)) return kLogZero;
        return lc + static_cast<double>(items - rows_wrong) * std::log(static_cast<double>(parts)) +
               static_cast<double>(power) * std::log(static_cast<double>(row_ways_v1));
    };

    if (v <= 3) return from_u128(term(v, v), log_term(v, v));

    // v in 4..7 adds configurations with one row holding three ones (weight 4).
    std::optional<u128> second = u128{0};
    double log_second = kLogZero;
    const std::int64_t triples = parts * (parts - 1) * (parts - 2) / 6; // C(P,3)
    {
        auto choose = checked_binomial(items, v - 3);
        if (choose && *choose != 0 && triples > 0) {
            auto rest = checked_pow(static_cast<u128>(parts), items - (v - 3));
            auto ways = checked_pow(static_cast<u128>(row_ways_v1), v - 4);
            if (rest && ways) {
                auto prod = checked_mul(*choose, *rest);
                if (prod) prod = checked_mul(*prod, static_cast<u128>(v - 3));
                if (prod) prod = checked_mul(*prod, static_cast<u128>(triples));
                if (prod) prod = checked_mul(*prod, *ways);
                second = prod;
            } else {
                second = std::nullopt;
            }
            const double lc = log_binomial(items, v - 3);
            if (!is_log_zero(lc)) {
                log_second = std::log(static_cast<double>(v - 3)) + lc +
                             static_cast<double>(items - (v - 3)) *
                                 std::log(static_cast<double>(parts)) +
                             std::log(static_cast<double>(triples)) +
                             static_cast<double>(v - 4) *
                                 std::log(static_cast<double>(row_ways_v1));
            }
        }
    }
    auto first = term(v, v);
    const double log_first = log_term(v, v);
    std::optional<u128> sum;
    if (first && second) sum = checked_add(*first, *second);
    return from_u128(sum, log_add(log_first, log_second));
}

CountValue npen_tsp(std::int64_t cities, std::int64_t v) {
    if (cities < 2) throw std::invalid_argument("npen_tsp: need at least 2 cities");
    if (v < 0 || v > 7)
        throw UnsupportedDegeneracy("npen_tsp: closed form derived for v <= 7 only");
    if (v % 2 == 1) return CountValue::zero();
    if (v == 0)
        return from_u128(checked_factorial(cities), log_factorial(cities));

    // Bracket sums with a common denominator so the product with n_v! stays in
    // integer arithmetic: the brackets below are (coeff_i * C(n_v, k_i)) / den.
    struct BracketTerm {
        std::int64_t coeff;
        std::int64_t k;
    };
    std::vector<BracketTerm> terms;
    std::int64_t den = 1;
    if (v == 2) {
        terms = {{2, 1}, {8, 2}, {3, 3}};
        den = 2;
    } else if (v == 4) {
        terms = {{4, 2}, {84, 3}, {228, 4}, {180, 5}, {45, 6}};
        den = 4;
    } else { // v == 6, including the overall factor 5 via coeff scaling (x5/60 = x/12)
        terms = {{188, 3}, {1440, 4}, {8220, 5}, {69420, 6}, {8505, 7}, {7560, 8}, {1890, 9}};
        den = 12;
    }

    std::optional<u128> bracket = u128{0};
    double log_bracket = kLogZero;
    for (const auto& t : terms) {
        auto binom = checked_binomial(cities, t.k);
        if (bracket && binom) {
            auto prod = checked_mul(static_cast<u128>(t.coeff), *binom);
            bracket = prod ? checked_add(*bracket, *prod) : std::nullopt;
        } else {
            bracket = std::nullopt;
        }
        const double lb = log_binomial(cities, t.k);
        if (!is_log_zero(lb))
            log_bracket = log_add(log_bracket, std::log(static_cast<double>(t.coeff)) + lb);
    }
    auto fact = checked_factorial(cities);
    std::optional<u128> result;
    if (bracket && fact) {
        auto prod = checked_mul(*fact, *bracket);
        if (prod) result = *prod / static_cast<u128>(den); // divisibility holds by construction
    }
    const double log_result = log_factorial(cities) + log_bracket - std::log(static_cast<double>(den));
    return from_u128(result, log_result);
}

namespace {

// Number of ways to distribute `units` indistinguishable units among `boxes`.
std::optional<u128> weak_compositions(std::int64_t units, std::int64_t boxes) {
    if (units < 0) return u128{0};
    return checked_binomial(units + boxes - 1, boxes - 1);
}

double log_weak_compositions(std::int64_t units, std::int64_t boxes) {
    if (units < 0) return kLogZero;
    return log_binomial(units + boxes - 1, boxes - 1);
}

} // namespace

CountValue npen_po(std::int64_t assets, std::int64_t bits, std::int64_t v) {
    if (assets < 1 || bits < 1) throw std::invalid_argument("npen_po: invalid instance size");
    if (v < 0) throw std::invalid_argument("npen_po: negative penalty value");
    const std::int64_t k = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
    if (k * k != v) return CountValue::zero(); // only perfect squares occur
    if (k > 5) throw UnsupportedDegeneracy("npen_po: closed form derived for v <= 25 only");
    if ((k == 3 || k == 4) && bits < 2)
        throw UnsupportedDegeneracy("npen_po: v in {9,16} derived for w >= 2 only");
    if (k == 5 && bits < 3) throw UnsupportedDegeneracy("npen_po: v = 25 derived for w >= 3 only");

    const std::int64_t budget = (std::int64_t{1} << bits) - 1; // 2^w - 1
    if (k == 0)
        return from_u128(weak_compositions(budget, assets), log_weak_compositions(budget, assets));

    // Undershoot: budget-k units unconstrained. Overshoot: budget+k units with
    // every box capped at budget; the correction term excludes arrangements
    // with an over-full box.
    std::optional<u128> correction = u128{0};
    switch (k) {
    case 1: correction = checked_pow(static_cast<u128>(assets), 1); break;
    case 2: correction = checked_pow(static_cast<u128>(assets), 2); break;
    case 3: {
        auto sq = checked_mul(static_cast<u128>(assets), static_cast<u128>(assets));
        correction = sq ? checked_mul(*sq, static_cast<u128>(assets + 1)) : std::nullopt;
        if (correction) correction = *correction / 2;
        break;
    }
    case 4: {
        auto sq = checked_mul(static_cast<u128>(assets), static_cast<u128>(assets));
        auto t = sq ? checked_mul(*sq, static_cast<u128>(assets + 1)) : std::nullopt;
        correction = t ? checked_mul(*t, static_cast<u128>(assets + 2)) : std::nullopt;
        if (correction) correction = *correction / 6;
        break;
    }
    case 5: {
        auto sq = checked_mul(static_cast<u128>(assets), static_cast<u128>(assets));
        auto t = sq ? checked_mul(*sq, static_cast<u128>(assets + 1)) : std::nullopt;
        t = t ? checked_mul(*t, static_cast<u128>(assets + 2)) : std::nullopt;
        correction = t ? checked_mul(*t, static_cast<u128>(assets + 3)) : std::nullopt;
        if (correction) correction = *correction / 24;
        break;
    }
    default: break;
    }

    auto under = weak_compositions(budget - k, assets);
    auto over = weak_compositions(budget + k, assets);
    std::optional<u128> result;
    if (under && over && correction) {
        auto sum = checked_add(*under, *over);
        if (sum) {
            if (*sum < *correction)
                throw std::logic_error("npen_po: negative count, formula guard violated");
            result = *sum - *correction;
        }
    }
    double log_result;
    if (result) {
        log_result = log_u128(*result);
    } else {
        // Out of u128 range: evaluate the difference in long double after a shift.
        const double lu = log_weak_compositions(budget - k, assets);
        const double lo = log_weak_compositions(budget + k, assets);
        const double lc = correction ? log_u128(*correction)
                                     : kLogZero; // correction fits u128 for any sane N
        const double shift = std::max(lu, lo);
        const long double linear = std::exp((long double)(lu - shift)) +
                                   std::exp((long double)(lo - shift)) -
                                   std::exp((long double)(lc - shift));
        log_result = shift + static_cast<double>(std::log(linear));
    }
    return from_u128(result, log_result);
}

CountValue feasible_count(const ProblemInstance& inst) {
    switch (inst.family()) {
    case Family::mnpp: {
        const auto& p = *inst.mnpp();
        return from_u128(checked_pow(static_cast<u128>(p.parts), p.items),
                         static_cast<double>(p.items) * std::log(static_cast<double>(p.parts)));
    }
    case Family::tsp: {
        const auto& p = *inst.tsp();
        return from_u128(checked_factorial(p.cities), log_factorial(p.cities));
    }
    case Family::po: {
        const auto& p = *inst.po();
        const std::int64_t budget = (std::int64_t{1} << p.bits) - 1;
        return from_u128(weak_compositions(budget, p.assets),
                         log_weak_compositions(budget, p.assets));
    }
    case Family::generic: {
        std::uint64_t count = 0;
        for_each_bitstring(inst, [&](std::uint64_t, double, std::int64_t pen) {
            if (pen == 0) ++count;
        });
        return CountValue::from_u64(count);
    }
    }
    throw std::logic_error("feasible_count: unreachable");
}

std::int64_t default_v_cut(const ProblemInstance& inst) {
    switch (inst.family()) {
    case Family::mnpp:
    case Family::tsp: return 4;
    case Family::po: return 16;
    case Family::generic: return penalty_upper_bound(inst);
    }
    return 4;
}

DegeneracyTable npen_analytic(const ProblemInstance& inst, std::int64_t v_cut) {
    if (v_cut < 1) throw std::invalid_argument("npen_analytic: v_cut must be >= 1");
    DegeneracyTable table;
    table.source = DegeneracyTable::Source::analytic;
    table.v_cut = v_cut;
    table.log_values.assign(static_cast<std::size_t>(v_cut) + 1, kLogZero);
    for (std::int64_t v = 0; v <= v_cut; ++v) {
        CountValue c;
        switch (inst.family()) {
        case Family::mnpp: c = npen_mnpp(inst.mnpp()->items, inst.mnpp()->parts, v); break;
        case Family::tsp: c = npen_tsp(inst.tsp()->cities, v); break;
        case Family::po: c = npen_po(inst.po()->assets, inst.po()->bits, v); break;
        case Family::generic:
            throw UnsupportedDegeneracy("npen_analytic: no closed form for generic instances");
        }
        table.log_values[static_cast<std::size_t>(v)] = c.log_value;
    }
    return table;
}

DegeneracyTable npen_bruteforce(const ProblemInstance& inst, std::int64_t v_cut) {
    if (v_cut < 1) throw std::invalid_argument("npen_bruteforce: v_cut must be >= 1");
    DegeneracyTable table;
    table.source = DegeneracyTable::Source::brute_force;
    table.v_cut = v_cut;
    table.exact.assign(static_cast<std::size_t>(v_cut) + 1, 0);
    for_each_bitstring(inst, [&](std::uint64_t, double, std::int64_t pen) {
        if (pen <= v_cut) ++table.exact[static_cast<std::size_t>(pen)];
    });
    table.log_values.resize(table.exact.size());
    for (std::size_t v = 0; v < table.exact.size(); ++v) {
        table.log_values[v] =
            table.exact[v] == 0 ? kLogZero : std::log(static_cast<double>(table.exact[v]));
    }
    return table;
}

StretchedExpFit fit_stretched_exponential(std::span<const double> vs,
                                          std::span<const double> log_counts) {
    if (vs.size() != log_counts.size() || vs.size() < 3)
        throw FitError("fit_stretched_exponential: need at least 3 points");

    const auto solve_for_k = [&](double k) {
        const std::size_t n = vs.size();
        double sx = 0, sxx = 0, sy = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = std::pow(vs[i], k);
            sx += x;
            sxx += x * x;
            sy += log_counts[i];
            sxy += x * log_counts[i];
        }
        const double det = static_cast<double>(n) * sxx - sx * sx;
        StretchedExpFit fit;
        fit.k = k;
        if (det <= 0) {
            fit.sse = std::numeric_limits<double>::infinity();
            return fit;
        }
        fit.b = (static_cast<double>(n) * sxy - sx * sy) / det;
        fit.a = (sy - fit.b * sx) / static_cast<double>(n);
        fit.sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = fit.a + fit.b * std::pow(vs[i], k) - log_counts[i];
            fit.sse += r * r;
        }
        return fit;
    };

    // Coarse grid over (0, 1.5], then a local golden-section refinement.
    StretchedExpFit best = solve_for_k(1.0);
    for (int i = 1; i <= 150; ++i) {
        const StretchedExpFit fit = solve_for_k(0.01 * i);
        if (fit.sse < best.sse) best = fit;
    }
    double lo = std::max(1e-3, best.k - 0.01);
    double hi = std::min(1.5, best.k + 0.01);
    constexpr double kGolden = 0.6180339887498949;
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    StretchedExpFit f1 = solve_for_k(x1);
    StretchedExpFit f2 = solve_for_k(x2);
    for (int iter = 0; iter < 60; ++iter) {
        if (f1.sse < f2.sse) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = solve_for_k(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = solve_for_k(x2);
        }
    }
    const StretchedExpFit refined = f1.sse < f2.sse ? f1 : f2;
    return refined.sse < best.sse ? refined : best;
}

DegeneracyTable npen_fit(const ProblemInstance& inst, std::int64_t samples, std::int64_t v_cut,
                         std::uint64_t seed) {
    if (samples < 1000) throw std::invalid_argument("npen_fit: need at least 1000 samples");
    if (v_cut < 1) throw std::invalid_argument("npen_fit: v_cut must be >= 1");

    const std::size_t n = inst.num_vars();
    Rng rng(seed);
    std::map<std::int64_t, std::uint64_t> histogram;
    Bitstring x(n, 0);
    for (std::int64_t s = 0; s < samples; ++s) {
        for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>(rng.next_u64() & 1u);
        ++histogram[penalty_energy(inst, x)];
    }

    // ln n_pen(v) ~= ln count(v) - ln samples + n ln 2.
    const double scale = static_cast<double>(n) * std::numbers::ln2_v<double> -
                         std::log(static_cast<double>(samples));
    std::vector<double> vs;
    std::vector<double> logs;
    for (const auto& [v, count] : histogram) {
        if (v < 1) continue;
        vs.push_back(static_cast<double>(v));
        logs.push_back(std::log(static_cast<double>(count)) + scale);
    }
    if (vs.size() < 3) throw FitError("npen_fit: fewer than 3 non-empty penalty bins");
    const StretchedExpFit fit = fit_stretched_exponential(vs, logs);

    DegeneracyTable table;
    table.source = DegeneracyTable::Source::fitted;
    table.v_cut = v_cut;
    table.extrapolated = static_cast<double>(v_cut) > vs.back();
    table.log_values.assign(static_cast<std::size_t>(v_cut) + 1, kLogZero);

    const CountValue f = [&] {
        try {
            return feasible_count(inst);
        } catch (const EnumCapExceeded&) {
            CountValue c;
            const auto it = histogram.find(0);
            if (it != histogram.end())
                c.log_value = std::log(static_cast<double>(it->second)) + scale;
            return c;
        }
    }();
    table.log_values[0] = f.log_value;

    for (std::int64_t v = 1; v <= v_cut; ++v) {
        // Preserve the family's known zero pattern.
        if (inst.family() == Family::tsp && v % 2 == 1) continue;
        if (inst.family() == Family::po) {
            const auto k = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
            if (k * k != v) continue;
        }
        table.log_values[static_cast<std::size_t>(v)] =
            fit.a + fit.b * std::pow(static_cast<double>(v), fit.k);
    }
    return table;
}

DegeneracyTable degeneracy_for(const ProblemInstance& inst, std::int64_t v_cut,
                               std::uint64_t seed) {
    const std::int64_t v_max = penalty_upper_bound(inst);
    const std::int64_t cut = std::min(v_cut, v_max);
    try {
        return npen_analytic(inst, cut);
    } catch (const UnsupportedDegeneracy&) {
    }
    if (inst.num_vars() <= enumeration_cap()) return npen_bruteforce(inst, cut);
    return npen_fit(inst, 100000, cut, seed);
}

} // namespace bigm
