#include "bigm/generators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bigm/rng.hpp"

namespace bigm {

MnppSpec MnppSpec::large_scale(std::int64_t parts, std::uint64_t seed) {
    MnppSpec spec;
    spec.parts = parts;
    spec.items = 8 * parts;
    spec.seed = seed;
    return spec;
}

ProblemInstance gen_mnpp(const MnppSpec& spec) {
    if (spec.items < 1 || spec.parts < 2)
        throw std::invalid_argument("gen_mnpp: need N >= 1 and P >= 2");
    const std::int64_t items = spec.items;
    const std::int64_t parts = spec.parts;

    std::vector<double> values = spec.values;
    if (values.empty()) {
        Rng rng(spec.seed);
        values.resize(static_cast<std::size_t>(items));
        for (double& v : values) v = rng.uniform(0.0, 1000.0);
    }
    if (static_cast<std::int64_t>(values.size()) != items)
        throw std::invalid_argument("gen_mnpp: value count differs from N");
    for (double v : values) {
        if (!(v > 0.0)) throw std::invalid_argument("gen_mnpp: values must be positive");
    }

    const std::size_t n = static_cast<std::size_t>(items * parts);
    const auto idx = [parts](std::int64_t i, std::int64_t p) {
        return static_cast<std::size_t>(i * parts + p);
    };

    double total = 0.0;
    for (double v : values) total += v;
    const double target = total / static_cast<double>(parts);

    // E^(o)(x) = sum_p (sum_i c_i x_{i,p} - target)^2, expanded into quadratic
    // coefficients c_i c_j per partition block, linear -2 target c_i, and the
    // constant target^2 per partition.
    EnergyMatrix quad(n);
    std::vector<double> linear(n, 0.0);
    for (std::int64_t p = 0; p < parts; ++p) {
        for (std::int64_t i = 0; i < items; ++i) {
            for (std::int64_t j = 0; j < items; ++j) {
                quad.add(idx(i, p), idx(j, p), values[i] * values[j]);
            }
            linear[idx(i, p)] = -2.0 * target * values[i];
        }
    }
    const double offset = static_cast<double>(parts) * target * target;

    // One right-stochasticity row per item: sum_p x_{i,p} = 1.
    ConstraintMatrix constraints;
    constraints.cols = n;
    constraints.rows.resize(static_cast<std::size_t>(items));
    std::vector<std::int64_t> rhs(static_cast<std::size_t>(items), 1);
    for (std::int64_t i = 0; i < items; ++i) {
        for (std::int64_t p = 0; p < parts; ++p) {
            constraints.rows[static_cast<std::size_t>(i)].push_back(
                {static_cast<std::uint32_t>(idx(i, p)), 1});
        }
    }

    MnppParams params{items, parts, values};
    return ProblemInstance(std::move(quad), std::move(linear), offset, std::move(constraints),
                           std::move(rhs), Family::mnpp, params);
}

namespace {

ProblemInstance build_tsp_instance(TspSpec spec) {
    const std::int64_t nv = spec.cities;
    if (nv < 2) throw std::invalid_argument("gen_tsp: need at least 2 cities");
    if (static_cast<std::int64_t>(spec.edge_weights.size()) != nv * nv)
        throw std::invalid_argument("gen_tsp: edge weight matrix size mismatch");
    for (std::int64_t i = 0; i < nv; ++i) {
        if (spec.edge_weights[static_cast<std::size_t>(i * nv + i)] != 0.0)
            throw std::invalid_argument("gen_tsp: nonzero self-edge");
        for (std::int64_t j = 0; j < nv; ++j) {
            const double e = spec.edge_weights[static_cast<std::size_t>(i * nv + j)];
            if (!(e >= 0.0)) throw std::invalid_argument("gen_tsp: negative edge weight");
            if (e != spec.edge_weights[static_cast<std::size_t>(j * nv + i)])
                throw std::invalid_argument("gen_tsp: asymmetric edge weights");
        }
    }

    const std::size_t n = static_cast<std::size_t>(nv * nv);
    const auto idx = [nv](std::int64_t t, std::int64_t i) {
        return static_cast<std::size_t>(t * nv + i);
    };

    // E^(o)(x) = sum_t sum_{i != j} e_{i,j} x_{t,i} x_{t+1,j}, cyclic in t.
    EnergyMatrix quad(n);
    for (std::int64_t t = 0; t < nv; ++t) {
        const std::int64_t t_next = (t + 1) % nv;
        for (std::int64_t i = 0; i < nv; ++i) {
            for (std::int64_t j = 0; j < nv; ++j) {
                if (i == j) continue;
                const double e = spec.edge_weights[static_cast<std::size_t>(i * nv + j)];
                if (e != 0.0) quad.add(idx(t, i), idx(t_next, j), e);
            }
        }
    }

    // Permutation-matrix constraints: one city per time step, each city once.
    ConstraintMatrix constraints;
    constraints.cols = n;
    constraints.rows.resize(static_cast<std::size_t>(2 * nv));
    std::vector<std::int64_t> rhs(static_cast<std::size_t>(2 * nv), 1);
    for (std::int64_t t = 0; t < nv; ++t) {
        for (std::int64_t i = 0; i < nv; ++i) {
            constraints.rows[static_cast<std::size_t>(t)].push_back(
                {static_cast<std::uint32_t>(idx(t, i)), 1});
        }
    }
    for (std::int64_t i = 0; i < nv; ++i) {
        for (std::int64_t t = 0; t < nv; ++t) {
            constraints.rows[static_cast<std::size_t>(nv + i)].push_back(
                {static_cast<std::uint32_t>(idx(t, i)), 1});
        }
    }

    TspParams params{nv, spec.edge_weights};
    return ProblemInstance(std::move(quad), {}, 0.0, std::move(constraints), std::move(rhs),
                           Family::tsp, params);
}

std::vector<double> euclidean_edges(const std::vector<double>& xs, const std::vector<double>& ys,
                                    bool round_to_int) {
    const std::size_t nv = xs.size();
    std::vector<double> edges(nv * nv, 0.0);
    for (std::size_t i = 0; i < nv; ++i) {
        for (std::size_t j = i + 1; j < nv; ++j) {
            const double dx = xs[i] - xs[j];
            const double dy = ys[i] - ys[j];
            double d = std::sqrt(dx * dx + dy * dy);
            if (round_to_int) d = std::floor(d + 0.5);
            edges[i * nv + j] = d;
            edges[j * nv + i] = d;
        }
    }
    return edges;
}

} // namespace

ProblemInstance gen_tsp(const TspSpec& spec) { return build_tsp_instance(spec); }

ProblemInstance gen_tsp_circle(std::int64_t cities, double radius) {
    if (cities < 2) throw std::invalid_argument("gen_tsp_circle: need at least 2 cities");
    if (!(radius > 0.0)) throw std::invalid_argument("gen_tsp_circle: radius must be positive");
    std::vector<double> xs(static_cast<std::size_t>(cities));
    std::vector<double> ys(static_cast<std::size_t>(cities));
    for (std::int64_t k = 0; k < cities; ++k) {
        const double angle =
            2.0 * std::numbers::pi_v<double> * static_cast<double>(k) / static_cast<double>(cities);
        xs[static_cast<std::size_t>(k)] = radius * std::cos(angle);
        ys[static_cast<std::size_t>(k)] = radius * std::sin(angle);
    }
    TspSpec spec;
    spec.cities = cities;
    spec.layout = TspLayout::circle;
    spec.edge_weights = euclidean_edges(xs, ys, false);
    return build_tsp_instance(spec);
}

ProblemInstance gen_tsp_random(std::int64_t cities, double side, std::uint64_t seed) {
    if (cities < 2) throw std::invalid_argument("gen_tsp_random: need at least 2 cities");
    if (!(side > 0.0)) throw std::invalid_argument("gen_tsp_random: side must be positive");
    Rng rng(seed);
    std::vector<double> xs(static_cast<std::size_t>(cities));
    std::vector<double> ys(static_cast<std::size_t>(cities));
    for (std::size_t k = 0; k < xs.size(); ++k) {
        xs[k] = rng.uniform(0.0, side);
        ys[k] = rng.uniform(0.0, side);
    }
    TspSpec spec;
    spec.cities = cities;
    spec.layout = TspLayout::random;
    spec.seed = seed;
    spec.edge_weights = euclidean_edges(xs, ys, false);
    return build_tsp_instance(spec);
}

double tour_cost(const TspSpec& spec, const std::vector<std::int64_t>& order) {
    if (static_cast<std::int64_t>(order.size()) != spec.cities)
        throw std::invalid_argument("tour_cost: order length mismatch");
    double cost = 0.0;
    const std::int64_t nv = spec.cities;
    for (std::int64_t t = 0; t < nv; ++t) {
        const std::int64_t a = order[static_cast<std::size_t>(t)];
        const std::int64_t b = order[static_cast<std::size_t>((t + 1) % nv)];
        cost += spec.edge_weights[static_cast<std::size_t>(a * nv + b)];
    }
    return cost;
}

namespace {

double quantize_1e4(double x) { return std::round(x * 1e4) / 1e4; }

void check_psd(const std::vector<double>& sigma, std::int64_t n_assets) {
    // Symmetry plus a Cholesky of Sigma + tol*I certifies min eig >= -tol.
    double scale = 0.0;
    for (std::int64_t a = 0; a < n_assets; ++a)
        scale = std::max(scale, std::abs(sigma[static_cast<std::size_t>(a * n_assets + a)]));
    const double sym_tol = 1e-9 * std::max(1.0, scale);
    for (std::int64_t a = 0; a < n_assets; ++a) {
        for (std::int64_t b = a + 1; b < n_assets; ++b) {
            if (std::abs(sigma[static_cast<std::size_t>(a * n_assets + b)] -
                         sigma[static_cast<std::size_t>(b * n_assets + a)]) > sym_tol)
                throw std::invalid_argument("gen_po: covariance not symmetric");
        }
    }
    const double tol = 1e-9 * std::max(1.0, scale);
    std::vector<double> chol(sigma);
    for (std::int64_t a = 0; a < n_assets; ++a)
        chol[static_cast<std::size_t>(a * n_assets + a)] += tol;
    for (std::int64_t i = 0; i < n_assets; ++i) {
        for (std::int64_t j = 0; j <= i; ++j) {
            double s = chol[static_cast<std::size_t>(i * n_assets + j)];
            for (std::int64_t k = 0; k < j; ++k)
                s -= chol[static_cast<std::size_t>(i * n_assets + k)] *
                     chol[static_cast<std::size_t>(j * n_assets + k)];
            if (i == j) {
                if (s <= 0.0) throw std::invalid_argument("gen_po: covariance not PSD within 1e-9");
                chol[static_cast<std::size_t>(i * n_assets + j)] = std::sqrt(s);
            } else {
                chol[static_cast<std::size_t>(i * n_assets + j)] =
                    s / chol[static_cast<std::size_t>(j * n_assets + j)];
            }
        }
    }
}

} // namespace

ReturnStatistics returns_from_prices(const PriceHistory& history) {
    const std::size_t t_steps = history.prices.size();
    if (t_steps < 3)
        throw std::invalid_argument("returns_from_prices: need at least 3 price rows");
    const std::size_t n_assets = history.assets.size();
    for (const auto& row : history.prices) {
        if (row.size() != n_assets)
            throw std::invalid_argument("returns_from_prices: ragged price table");
        for (double p : row) {
            if (!(p > 0.0)) throw std::invalid_argument("returns_from_prices: non-positive price");
        }
    }

    const std::size_t n_returns = t_steps - 1;
    std::vector<std::vector<double>> returns(n_returns, std::vector<double>(n_assets));
    for (std::size_t t = 1; t < t_steps; ++t) {
        for (std::size_t a = 0; a < n_assets; ++a) {
            returns[t - 1][a] =
                (history.prices[t][a] - history.prices[t - 1][a]) / history.prices[t - 1][a];
        }
    }

    ReturnStatistics stats;
    stats.mean.assign(n_assets, 0.0);
    for (const auto& row : returns) {
        for (std::size_t a = 0; a < n_assets; ++a) stats.mean[a] += row[a];
    }
    for (double& m : stats.mean) m /= static_cast<double>(n_returns);

    stats.covariance.assign(n_assets * n_assets, 0.0);
    for (const auto& row : returns) {
        for (std::size_t a = 0; a < n_assets; ++a) {
            for (std::size_t b = 0; b < n_assets; ++b) {
                stats.covariance[a * n_assets + b] +=
                    (row[a] - stats.mean[a]) * (row[b] - stats.mean[b]);
            }
        }
    }
    for (double& c : stats.covariance) c /= static_cast<double>(n_returns - 1);

    for (double& m : stats.mean) m = quantize_1e4(m);
    for (double& c : stats.covariance) c = quantize_1e4(c);
    return stats;
}

PriceHistory parse_price_csv(std::string_view text) {
    PriceHistory history;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t cell_start = 0;
        for (std::size_t k = 0; k <= line.size(); ++k) {
            if (k == line.size() || line[k] == ',') {
                cells.emplace_back(line.substr(cell_start, k - cell_start));
                cell_start = k + 1;
            }
        }
        if (header) {
            history.assets = cells;
            header = false;
            continue;
        }
        if (cells.size() != history.assets.size())
            throw std::invalid_argument("parse_price_csv: row width differs from header");
        std::vector<double> row(cells.size());
        for (std::size_t k = 0; k < cells.size(); ++k) {
            std::size_t consumed = 0;
            row[k] = std::stod(cells[k], &consumed);
            if (consumed != cells[k].size())
                throw std::invalid_argument("parse_price_csv: malformed number '" + cells[k] + "'");
        }
        history.prices.push_back(std::move(row));
    }
    if (history.assets.empty()) throw std::invalid_argument("parse_price_csv: missing header");
    return history;
}

ProblemInstance gen_po(const PoSpec& spec) {
    const std::int64_t assets = spec.assets;
    const std::int64_t bits = spec.bits;
    if (assets < 1 || bits < 1) throw std::invalid_argument("gen_po: need N >= 1 and w >= 1");
    // gamma = 0 drops the risk term and leaves a purely linear objective.
    if (!(spec.risk_aversion >= 0.0))
        throw std::invalid_argument("gen_po: risk aversion must be non-negative");
    if (static_cast<std::int64_t>(spec.mu.size()) != assets ||
        static_cast<std::int64_t>(spec.sigma.size()) != assets * assets)
        throw std::invalid_argument("gen_po: mu/sigma dimensions mismatch");
    check_psd(spec.sigma, assets);

    const double chunks = static_cast<double>((std::int64_t{1} << bits) - 1);
    std::vector<double> mu(spec.mu);
    std::vector<double> sigma(spec.sigma);
    for (double& v : mu) v /= chunks;
    for (double& v : sigma) v /= chunks * chunks;

    const std::size_t n = static_cast<std::size_t>(assets * bits);
    const auto idx = [bits](std::int64_t a, std::int64_t j) {
        return static_cast<std::size_t>(a * bits + j);
    };

    // Objective -mu'x + gamma x'Sigma x over integer variables x_a encoded in
    // binary with bit weights 2^j.
    EnergyMatrix quad(n);
    std::vector<double> linear(n, 0.0);
    for (std::int64_t a = 0; a < assets; ++a) {
        for (std::int64_t b = 0; b < assets; ++b) {
            const double s = sigma[static_cast<std::size_t>(a * assets + b)];
            if (s == 0.0) continue;
            for (std::int64_t j = 0; j < bits; ++j) {
                for (std::int64_t k = 0; k < bits; ++k) {
                    const double weight = static_cast<double>(std::int64_t{1} << (j + k));
                    quad.add(idx(a, j), idx(b, k), spec.risk_aversion * s * weight);
                }
            }
        }
        for (std::int64_t j = 0; j < bits; ++j) {
            linear[idx(a, j)] -= mu[static_cast<std::size_t>(a)] *
                                 static_cast<double>(std::int64_t{1} << j);
        }
    }

    // Single budget row: sum of integer variables equals 2^w - 1.
    ConstraintMatrix constraints;
    constraints.cols = n;
    constraints.rows.resize(1);
    for (std::int64_t a = 0; a < assets; ++a) {
        for (std::int64_t j = 0; j < bits; ++j) {
            constraints.rows[0].push_back(
                {static_cast<std::uint32_t>(idx(a, j)), std::int64_t{1} << j});
        }
    }
    std::vector<std::int64_t> rhs{(std::int64_t{1} << bits) - 1};

    PoParams params{assets, bits, spec.risk_aversion};
    return ProblemInstance(std::move(quad), std::move(linear), 0.0, std::move(constraints),
                           std::move(rhs), Family::po, params);
}

PoSpec synthetic_po_spec(std::int64_t assets, std::int64_t bits, double risk_aversion,
                         std::uint64_t seed) {
    if (assets < 1) throw std::invalid_argument("synthetic_po_spec: need N >= 1");
    PoSpec spec;
    spec.assets = assets;
    spec.bits = bits;
    spec.risk_aversion = risk_aversion;
    spec.seed = seed;
    Rng rng(seed);
    spec.mu.resize(static_cast<std::size_t>(assets));
    for (double& v : spec.mu) v = rng.uniform(-0.05, 0.05);
    // Factor loadings G (N x N), covariance G'G: PSD by construction.
    const std::size_t na = static_cast<std::size_t>(assets);
    std::vector<double> g(na * na);
    for (double& v : g) v = rng.uniform(-0.02, 0.02);
    spec.sigma.assign(na * na, 0.0);
    for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t b = 0; b < na; ++b) {
            double acc = 0.0;
            for (std::size_t k = 0; k < na; ++k) acc += g[k * na + a] * g[k * na + b];
            spec.sigma[a * na + b] = acc;
        }
    }
    return spec;
}

} // namespace bigm
