#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bigm/generators.hpp"

namespace bigm {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

} // namespace

TspSpec parse_tsplib(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;

    std::int64_t dimension = -1;
    std::string weight_type;
    std::string weight_format;
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> matrix_values;
    bool saw_coords = false;
    bool saw_matrix = false;

    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty()) continue;
        const std::string key = upper(t.substr(0, t.find(':') == std::string::npos
                                                      ? t.find(' ')
                                                      : t.find(':')));
        const std::string keyword = trim(key);

        if (keyword == "EOF") break;

        if (keyword == "NODE_COORD_SECTION") {
            if (dimension <= 0) throw std::invalid_argument("tsplib: DIMENSION missing before coords");
            xs.resize(static_cast<std::size_t>(dimension));
            ys.resize(static_cast<std::size_t>(dimension));
            for (std::int64_t k = 0; k < dimension; ++k) {
                std::int64_t id;
                double x, y;
                if (!(in >> id >> x >> y))
                    throw std::invalid_argument("tsplib: malformed NODE_COORD_SECTION");
                if (id < 1 || id > dimension)
                    throw std::invalid_argument("tsplib: node id out of range");
                xs[static_cast<std::size_t>(id - 1)] = x;
                ys[static_cast<std::size_t>(id - 1)] = y;
            }
            saw_coords = true;
            continue;
        }
        if (keyword == "EDGE_WEIGHT_SECTION") {
            if (dimension <= 0) throw std::invalid_argument("tsplib: DIMENSION missing before weights");
            matrix_values.resize(static_cast<std::size_t>(dimension * dimension));
            for (double& v : matrix_values) {
                if (!(in >> v)) throw std::invalid_argument("tsplib: malformed EDGE_WEIGHT_SECTION");
            }
            saw_matrix = true;
            continue;
        }

        const std::size_t colon = t.find(':');
        if (colon == std::string::npos) continue; // unknown section-free keyword, skip
        const std::string value = trim(t.substr(colon + 1));
        if (keyword == "DIMENSION") {
            dimension = std::stoll(value);
            if (dimension < 2) throw std::invalid_argument("tsplib: DIMENSION must be >= 2");
        } else if (keyword == "EDGE_WEIGHT_TYPE") {
            weight_type = upper(value);
        } else if (keyword == "EDGE_WEIGHT_FORMAT") {
            weight_format = upper(value);
        }
    }

    if (dimension <= 0) throw std::invalid_argument("tsplib: DIMENSION missing");

    TspSpec spec;
    spec.cities = dimension;
    spec.layout = TspLayout::file;

    if (weight_type == "EUC_2D") {
        if (!saw_coords) throw std::invalid_argument("tsplib: missing NODE_COORD_SECTION");
        const std::size_t nv = static_cast<std::size_t>(dimension);
        spec.edge_weights.assign(nv * nv, 0.0);
        for (std::size_t i = 0; i < nv; ++i) {
            for (std::size_t j = i + 1; j < nv; ++j) {
                const double dx = xs[i] - xs[j];
                const double dy = ys[i] - ys[j];
                // TSPLIB95 convention: nint(sqrt(dx^2 + dy^2)).
                const double d = std::floor(std::sqrt(dx * dx + dy * dy) + 0.5);
                spec.edge_weights[i * nv + j] = d;
                spec.edge_weights[j * nv + i] = d;
            }
        }
        return spec;
    }
    if (weight_type == "EXPLICIT") {
        if (weight_format != "FULL_MATRIX")
            throw std::invalid_argument("tsplib: unsupported EDGE_WEIGHT_FORMAT '" + weight_format +
                                        "' (only FULL_MATRIX)");
        if (!saw_matrix) throw std::invalid_argument("tsplib: missing EDGE_WEIGHT_SECTION");
        spec.edge_weights = std::move(matrix_values);
        const std::size_t nv = static_cast<std::size_t>(dimension);
        for (std::size_t i = 0; i < nv; ++i) {
            if (spec.edge_weights[i * nv + i] != 0.0)
                throw std::invalid_argument("tsplib: nonzero diagonal in FULL_MATRIX");
        }
        return spec;
    }
    throw std::invalid_argument("tsplib: unsupported EDGE_WEIGHT_TYPE '" + weight_type + "'");
}

} // namespace bigm
