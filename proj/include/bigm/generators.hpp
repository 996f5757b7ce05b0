#ifndef BIGM_GENERATORS_HPP
#define BIGM_GENERATORS_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bigm/problem.hpp"

namespace bigm {

struct MnppSpec {
    std::int64_t items = 0;       // N
    std::int64_t parts = 0;       // P
    std::vector<double> values;   // empty: drawn uniformly from [0, 1000]
    std::uint64_t seed = 0;

    /// Large-scale sizing keeps N = 8 P so the per-partition load stays
    /// constant as the system grows.
    static MnppSpec large_scale(std::int64_t parts, std::uint64_t seed);
};

enum class TspLayout { circle, random, file };

struct TspSpec {
    std::int64_t cities = 0;           // n_v
    std::vector<double> edge_weights;  // row-major n_v x n_v
    TspLayout layout = TspLayout::file;
    std::uint64_t seed = 0;
};

struct PoSpec {
    std::int64_t assets = 0;      // N
    std::int64_t bits = 0;        // w
    double risk_aversion = 1.0;   // gamma
    std::vector<double> mu;       // raw expected returns (before 2^w-1 scaling)
    std::vector<double> sigma;    // raw covariance, row-major N x N
    std::uint64_t seed = 0;
};

struct PriceHistory {
    std::vector<std::string> assets;
    std::vector<std::vector<double>> prices; // prices[t][a], T rows
};

ProblemInstance gen_mnpp(const MnppSpec& spec);

ProblemInstance gen_tsp(const TspSpec& spec);
ProblemInstance gen_tsp_circle(std::int64_t cities, double radius);
ProblemInstance gen_tsp_random(std::int64_t cities, double side, std::uint64_t seed);

/// Parses the TSPLIB95 subset: EDGE_WEIGHT_TYPE EUC_2D (coordinates, rounded
/// to nearest integer) or EXPLICIT with EDGE_WEIGHT_FORMAT FULL_MATRIX.
TspSpec parse_tsplib(std::string_view text);

/// Per-step relative returns, their mean and 1/(T-1)-normalized covariance,
/// quantized to 1e-4.
struct ReturnStatistics {
    std::vector<double> mean;        // mu~
    std::vector<double> covariance;  // Sigma~, row-major
};
ReturnStatistics returns_from_prices(const PriceHistory& history);

/// Parses a price CSV: header row of asset identifiers, one row of decimal
/// prices per time step.
PriceHistory parse_price_csv(std::string_view text);

ProblemInstance gen_po(const PoSpec& spec);

/// Synthetic PO spec for tests without data files: PSD covariance from factor
/// loadings G'G, returns uniform in [-0.05, 0.05].
PoSpec synthetic_po_spec(std::int64_t assets, std::int64_t bits, double risk_aversion,
                         std::uint64_t seed);

/// Tour cost of visiting order[0] -> order[1] -> ... -> order[0].
double tour_cost(const TspSpec& spec, const std::vector<std::int64_t>& order);

} // namespace bigm

#endif // BIGM_GENERATORS_HPP
