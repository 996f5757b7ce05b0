#include "bigm/problem.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>

#include "bigm/rng.hpp"

namespace bigm {

std::size_t enumeration_cap() {
    static const std::size_t cap = [] {
        if (const char* env = std::getenv("BIGM_ENUM_CAP")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v >= 1 && v <= 30) return static_cast<std::size_t>(v);
        }
        return std::size_t{24};
    }();
    return cap;
}

std::string family_name(Family f) {
    switch (f) {
    case Family::mnpp: return "mnpp";
    case Family::tsp: return "tsp";
    case Family::po: return "po";
    case Family::generic: return "generic";
    }
    return "generic";
}

ProblemInstance::ProblemInstance(EnergyMatrix quad, std::vector<double> linear,
                                 double objective_offset, ConstraintMatrix constraints,
                                 std::vector<std::int64_t> rhs, Family family,
                                 FamilyParams params)
    : n_(quad.size()),
      m_(constraints.row_count()),
      quad_(std::move(quad)),
      linear_(std::move(linear)),
      objective_offset_(objective_offset),
      constraints_(std::move(constraints)),
      rhs_(std::move(rhs)),
      family_(family),
      params_(std::move(params)) {
    if (linear_.empty()) linear_.assign(n_, 0.0);
    // Fold linear terms onto the diagonal (x_i^2 = x_i).
    for (std::size_t i = 0; i < n_; ++i) {
        if (linear_[i] != 0.0) quad_.add(i, i, linear_[i]);
    }
    validate();
}

ProblemInstance ProblemInstance::from_folded(EnergyMatrix quad, std::vector<double> linear,
                                             double objective_offset,
                                             ConstraintMatrix constraints,
                                             std::vector<std::int64_t> rhs, Family family,
                                             FamilyParams params) {
    ProblemInstance inst(std::move(quad), {}, objective_offset, std::move(constraints),
                         std::move(rhs), family, std::move(params));
    if (!linear.empty()) {
        if (linear.size() != inst.n_)
            throw std::invalid_argument("from_folded: linear vector length mismatch");
        inst.linear_ = std::move(linear);
    }
    return inst;
}

void ProblemInstance::validate() const {
    if (linear_.size() != n_) throw std::invalid_argument("instance: linear vector length mismatch");
    if (rhs_.size() != m_) throw std::invalid_argument("instance: rhs length mismatch");
    if (constraints_.cols != n_) throw std::invalid_argument("instance: constraint column count mismatch");
    if (!quad_.all_finite() || !std::isfinite(objective_offset_))
        throw std::invalid_argument("instance: non-finite objective coefficients");
    for (const auto& row : constraints_.rows) {
        for (const auto& entry : row) {
            if (entry.col >= n_) throw std::invalid_argument("instance: constraint index out of range");
        }
    }
    switch (family_) {
    case Family::mnpp: {
        const auto* p = mnpp();
        if (!p || static_cast<std::size_t>(p->items * p->parts) != n_)
            throw std::invalid_argument("instance: mnpp parameters inconsistent with n");
        break;
    }
    case Family::tsp: {
        const auto* p = tsp();
        if (!p || static_cast<std::size_t>(p->cities * p->cities) != n_)
            throw std::invalid_argument("instance: tsp parameters inconsistent with n");
        break;
    }
    case Family::po: {
        const auto* p = po();
        if (!p || static_cast<std::size_t>(p->assets * p->bits) != n_)
            throw std::invalid_argument("instance: po parameters inconsistent with n");
        break;
    }
    case Family::generic: break;
    }
}

double objective_energy(const ProblemInstance& inst, const Bitstring& x) {
    if (x.size() != inst.num_vars())
        throw std::invalid_argument("objective_energy: bitstring length mismatch");
    return inst.quad().quad_form(x) + inst.objective_offset();
}

namespace {

std::int64_t checked_square_sum(std::int64_t residual, std::int64_t acc) {
    const __int128 sq = static_cast<__int128>(residual) * residual;
    const __int128 sum = static_cast<__int128>(acc) + sq;
    if (sum > std::numeric_limits<std::int64_t>::max())
        throw std::overflow_error("penalty_energy: value exceeds 64-bit range");
    return static_cast<std::int64_t>(sum);
}

} // namespace

std::int64_t penalty_energy(const ProblemInstance& inst, const Bitstring& x) {
    if (x.size() != inst.num_vars())
        throw std::invalid_argument("penalty_energy: bitstring length mismatch");
    std::int64_t acc = 0;
    const auto& rows = inst.constraints().rows;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        std::int64_t residual = -inst.rhs()[j];
        for (const auto& entry : rows[j]) {
            if (x[entry.col]) residual += entry.coeff;
        }
        acc = checked_square_sum(residual, acc);
    }
    return acc;
}

bool is_feasible(const ProblemInstance& inst, const Bitstring& x) {
    return penalty_energy(inst, x) == 0;
}

QuboReformulation::QuboReformulation(ProblemInstance instance, double penalty_weight)
    : instance_(std::move(instance)), m_(penalty_weight) {
    if (!(m_ >= 0.0)) throw std::invalid_argument("build_qubo: penalty weight must be non-negative");
    const std::size_t n = instance_.num_vars();
    q_total_ = EnergyMatrix(n, instance_.quad().is_dense() ? EnergyMatrix::Storage::dense
                                                           : EnergyMatrix::Storage::sparse);
    instance_.quad().for_each(
        [&](std::size_t i, std::size_t j, double v) { q_total_.add(i, j, v); });
    // (Ax-b)^2 = x' A'A x - 2 b'Ax + b'b; the linear part folds onto the
    // diagonal since x_i^2 = x_i.
    offset_ = instance_.objective_offset();
    const auto& rows = instance_.constraints().rows;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        const auto& row = rows[j];
        const double b_j = static_cast<double>(instance_.rhs()[j]);
        for (const auto& e1 : row) {
            for (const auto& e2 : row) {
                q_total_.add(e1.col, e2.col,
                             m_ * static_cast<double>(e1.coeff) * static_cast<double>(e2.coeff));
            }
            q_total_.add(e1.col, e1.col, -2.0 * m_ * b_j * static_cast<double>(e1.coeff));
        }
        offset_ += m_ * b_j * b_j;
    }
    verify_expansion();
}

void QuboReformulation::verify_expansion() const {
    // Spot equality of the matrix form against the objective/penalty split on
    // random bitstrings; check count bounded for very dense expansions.
    const std::size_t n = instance_.num_vars();
    const int checks = q_total_.nonzero_count() <= 100000 ? 100 : 4;
    std::uint64_t state = 0x1234abcdu ^ static_cast<std::uint64_t>(n);
    Bitstring x(n, 0);
    for (int trial = 0; trial < checks; ++trial) {
        for (std::size_t i = 0; i < n; ++i)
            x[i] = static_cast<std::uint8_t>(Rng::splitmix64(state) & 1u);
        const double objective = objective_energy(instance_, x);
        const double penalty = static_cast<double>(penalty_energy(instance_, x));
        const double split = objective + m_ * penalty;
        const double matrix_form = energy(x);
        // Tolerance relative to the intermediate magnitudes, which dominate
        // the rounding of the two summation routes.
        const double scale = std::abs(objective) + m_ * penalty + std::abs(offset_) + 1.0;
        if (std::abs(matrix_form - split) > 1e-9 * scale)
            throw std::logic_error("build_qubo: expansion disagrees with the energy split");
    }
}

double QuboReformulation::energy(const Bitstring& x) const {
    return q_total_.quad_form(x) + offset_;
}

EnergyBreakdown total_energy(const QuboReformulation& reform, const Bitstring& x) {
    EnergyBreakdown out;
    out.objective = objective_energy(reform.instance(), x);
    out.penalty = penalty_energy(reform.instance(), x);
    out.total = out.objective + reform.penalty_weight() * static_cast<double>(out.penalty);
    return out;
}

QuboReformulation build_qubo(const ProblemInstance& inst, double penalty_weight) {
    return QuboReformulation(inst, penalty_weight);
}

double l1_norm(const ProblemInstance& inst) {
    return inst.quad().l1_norm();
}

double big_m_l1(const ProblemInstance& inst, double beta, double eta) {
    if (!(beta > 0.0)) throw std::invalid_argument("big_m_l1: beta must be positive");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("big_m_l1: eta must be in (0,1)");
    const double n = static_cast<double>(inst.num_vars());
    const double thermal =
        std::isinf(beta) ? 0.0 : (n * std::numbers::ln2_v<double> - std::log1p(-eta)) / beta;
    return thermal + l1_norm(inst);
}

std::int64_t penalty_upper_bound(const ProblemInstance& inst) {
    // Per row, the worst violation is max(s+ - b, b - s-) where s+/s- are the
    // sums of positive/negative coefficients. For MNPP, TSP and PO this equals
    // the exact maximum N(P-1)^2, 2 n_v (n_v-1)^2 and (2^w-1)^2 (N-1)^2.
    std::int64_t acc = 0;
    const auto& rows = inst.constraints().rows;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        std::int64_t pos = 0;
        std::int64_t neg = 0;
        for (const auto& entry : rows[j]) {
            if (entry.coeff > 0) pos += entry.coeff;
            else neg += entry.coeff;
        }
        const std::int64_t b_j = inst.rhs()[j];
        const std::int64_t worst = std::max(pos - b_j, b_j - neg);
        acc = checked_square_sum(std::max<std::int64_t>(worst, 0), acc);
    }
    return acc;
}

double objective_lower_bound_trivial(const ProblemInstance& inst) {
    // MNPP (B2) and TSP (B5) objectives are sums of squares / non-negative
    // edge weights, so zero is valid there.
    if (inst.family() == Family::mnpp || inst.family() == Family::tsp) return 0.0;
    return inst.quad().negative_sum() + inst.objective_offset();
}

Bitstring bitstring_from_code(std::uint64_t code, std::size_t n) {
    Bitstring x(n, 0);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((code >> i) & 1u);
    return x;
}

} // namespace bigm
