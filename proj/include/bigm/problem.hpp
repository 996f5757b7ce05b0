#ifndef BIGM_PROBLEM_HPP
#define BIGM_PROBLEM_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bigm/matrix.hpp"

namespace bigm {

// Thrown when a 2^n enumeration would exceed the configured cap.
struct EnumCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by samplers and counters that need a structured problem family.
struct UnsupportedFamily : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Maximum n for which 2^n enumerations are permitted. Defaults to 24,
/// overridable through the BIGM_ENUM_CAP environment variable.
std::size_t enumeration_cap();

enum class Family { generic, mnpp, tsp, po };

std::string family_name(Family f);

struct MnppParams {
    std::int64_t items = 0;       // N
    std::int64_t parts = 0;       // P
    std::vector<double> values;   // c_1..c_N
};

struct TspParams {
    std::int64_t cities = 0;           // n_v
    std::vector<double> edge_weights;  // row-major n_v x n_v, symmetric, zero diagonal
};

struct PoParams {
    std::int64_t assets = 0;        // N
    std::int64_t bits = 0;          // w, binary digits per integer variable
    double risk_aversion = 0.0;     // gamma
};

using FamilyParams = std::variant<std::monostate, MnppParams, TspParams, PoParams>;

struct ConstraintEntry {
    std::uint32_t col;
    std::int64_t coeff;
};

/// Integer equality constraints A x = b, stored row-wise sparse.
struct ConstraintMatrix {
    std::size_t cols = 0;
    std::vector<std::vector<ConstraintEntry>> rows;

    std::size_t row_count() const { return rows.size(); }
};

/// A linearly constrained binary optimization instance:
/// minimize x'Qx (+ linear + constant) subject to A x = b, x in {0,1}^n.
///
/// Linear terms are folded onto the diagonal of the quadratic matrix at
/// construction (x_i^2 = x_i); the original linear vector is retained for
/// serialization and for external bound providers that want the split form.
/// Instances are immutable after construction and safe to share across
/// threads.
class ProblemInstance {
public:
    ProblemInstance(EnergyMatrix quad, std::vector<double> linear, double objective_offset,
                    ConstraintMatrix constraints, std::vector<std::int64_t> rhs,
                    Family family = Family::generic, FamilyParams params = std::monostate{});

    /// Assembly from serialized form, where the quadratic matrix already
    /// carries the linear terms on its diagonal and `linear` is informational.
    static ProblemInstance from_folded(EnergyMatrix quad, std::vector<double> linear,
                                       double objective_offset, ConstraintMatrix constraints,
                                       std::vector<std::int64_t> rhs, Family family,
                                       FamilyParams params);

    std::size_t num_vars() const { return n_; }
    std::size_t num_constraints() const { return m_; }

    /// Quadratic matrix with linear terms already folded onto the diagonal.
    const EnergyMatrix& quad() const { return quad_; }
    const std::vector<double>& linear() const { return linear_; }
    double objective_offset() const { return objective_offset_; }

    const ConstraintMatrix& constraints() const { return constraints_; }
    const std::vector<std::int64_t>& rhs() const { return rhs_; }

    Family family() const { return family_; }
    const FamilyParams& family_params() const { return params_; }
    const MnppParams* mnpp() const { return std::get_if<MnppParams>(&params_); }
    const TspParams* tsp() const { return std::get_if<TspParams>(&params_); }
    const PoParams* po() const { return std::get_if<PoParams>(&params_); }

private:
    void validate() const;

    std::size_t n_ = 0;
    std::size_t m_ = 0;
    EnergyMatrix quad_;
    std::vector<double> linear_;
    double objective_offset_ = 0.0;
    ConstraintMatrix constraints_;
    std::vector<std::int64_t> rhs_;
    Family family_ = Family::generic;
    FamilyParams params_;
};

struct EnergyBreakdown {
    double objective = 0.0;
    std::int64_t penalty = 0;
    double total = 0.0;
};

/// QUBO reformulation E(x) = E^(o)(x) + M (Ax-b)^2 as a single matrix plus
/// scalar offset: E(x) = x' Q_total x + offset.
class QuboReformulation {
public:
    QuboReformulation(ProblemInstance instance, double penalty_weight);

    const ProblemInstance& instance() const { return instance_; }
    double penalty_weight() const { return m_; }
    const EnergyMatrix& q_total() const { return q_total_; }
    double offset() const { return offset_; }

    /// x' Q_total x + offset.
    double energy(const Bitstring& x) const;

private:
    void verify_expansion() const;

    ProblemInstance instance_;
    double m_ = 0.0;
    EnergyMatrix q_total_;
    double offset_ = 0.0;
};

/// E^(o)(x): the objective energy, including folded linear and constant parts.
double objective_energy(const ProblemInstance& inst, const Bitstring& x);

/// E^(p)(x) = (Ax - b)^2, evaluated in exact integer arithmetic.
std::int64_t penalty_energy(const ProblemInstance& inst, const Bitstring& x);

bool is_feasible(const ProblemInstance& inst, const Bitstring& x);

EnergyBreakdown total_energy(const QuboReformulation& reform, const Bitstring& x);

QuboReformulation build_qubo(const ProblemInstance& inst, double penalty_weight);

/// Sum of |Q_ij| over all entries of the (folded) objective matrix.
double l1_norm(const ProblemInstance& inst);

/// Direct baseline penalty weight M_l1(beta) = (n ln2 - ln(1-eta)) / beta + |Q|_l1.
/// beta may be +infinity, in which case the thermal term vanishes.
double big_m_l1(const ProblemInstance& inst, double beta, double eta);

/// Upper bound on max_x E^(p)(x); exact for the structured families.
std::int64_t penalty_upper_bound(const ProblemInstance& inst);

/// A valid lower bound on min_x E^(o)(x): 0 for MNPP/TSP, entrywise negative
/// sum plus constant otherwise.
double objective_lower_bound_trivial(const ProblemInstance& inst);

Bitstring bitstring_from_code(std::uint64_t code, std::size_t n);

} // namespace bigm

#endif // BIGM_PROBLEM_HPP
