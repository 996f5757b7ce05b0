#ifndef BIGM_WALKER_HPP
#define BIGM_WALKER_HPP

#include <cstdint>
#include <vector>

#include "bigm/problem.hpp"

namespace bigm {

/// Incremental single-bit-flip evaluator for E^(o) and E^(p).
///
/// Flipping bit i updates the objective in O(row degree) via cached
/// symmetrized rows and the penalty in O(column degree) via constraint
/// residuals. The objective accumulator is rebased from scratch every
/// kRebaseInterval flips to keep float drift below testing tolerances.
class EnergyWalker {
public:
    static constexpr std::uint64_t kRebaseInterval = 4096;

    explicit EnergyWalker(const ProblemInstance& inst);

    void reset(const Bitstring& x);
    void reset_zero();

    void flip(std::size_t i);

    double objective() const { return objective_ + inst_->objective_offset(); }
    std::int64_t penalty() const { return penalty_; }
    const Bitstring& state() const { return x_; }

    /// Change of E^(o) if bit i were flipped now.
    double objective_delta(std::size_t i) const;
    /// Change of E^(p) if bit i were flipped now.
    std::int64_t penalty_delta(std::size_t i) const;

private:
    void rebase();

    struct SymEntry {
        std::uint32_t col;
        double weight; // Q_ij + Q_ji for j != i
    };
    struct ColEntry {
        std::uint32_t row;
        std::int64_t coeff;
    };

    const ProblemInstance* inst_;
    std::vector<std::vector<SymEntry>> sym_rows_;
    std::vector<double> diag_;
    std::vector<std::vector<ColEntry>> columns_;
    Bitstring x_;
    std::vector<std::int64_t> residuals_; // A x - b per row
    double objective_ = 0.0;              // excludes the constant offset
    std::int64_t penalty_ = 0;
    std::uint64_t flips_since_rebase_ = 0;
};

/// Enumerates all 2^n bitstrings in Gray-code order, invoking
/// f(code, objective, penalty) once per bitstring, where `code` has bit i of
/// the bitstring in bit i. Throws EnumCapExceeded when n exceeds the cap.
template <class F>
void for_each_bitstring(const ProblemInstance& inst, F&& f) {
    const std::size_t n = inst.num_vars();
    if (n > enumeration_cap())
        throw EnumCapExceeded("enumeration over 2^n requested for n = " + std::to_string(n) +
                              " exceeds cap " + std::to_string(enumeration_cap()));
    EnergyWalker walker(inst);
    walker.reset_zero();
    const std::uint64_t total = std::uint64_t{1} << n;
    std::uint64_t code = 0;
    f(code, walker.objective(), walker.penalty());
    for (std::uint64_t t = 1; t < total; ++t) {
        const std::size_t bit = static_cast<std::size_t>(__builtin_ctzll(t));
        walker.flip(bit);
        code ^= (std::uint64_t{1} << bit);
        f(code, walker.objective(), walker.penalty());
    }
}

} // namespace bigm

#endif // BIGM_WALKER_HPP
