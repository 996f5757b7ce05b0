#ifndef BIGM_MATRIX_HPP
#define BIGM_MATRIX_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bigm {

using Bitstring = std::vector<std::uint8_t>;

/// Square real coefficient matrix for binary quadratic forms.
///
/// Stored dense up to kDenseLimit variables and as merged coordinate
/// triplets beyond; both forms evaluate identically.
class EnergyMatrix {
public:
    struct Triplet {
        std::uint32_t row;
        std::uint32_t col;
        double value;
    };

    enum class Storage { automatic, dense, sparse };

    static constexpr std::size_t kDenseLimit = 4096;

    EnergyMatrix() = default;
    explicit EnergyMatrix(std::size_t n, Storage storage = Storage::automatic);

    std::size_t size() const { return n_; }
    bool is_dense() const { return dense_; }

    /// Accumulates `value` onto entry (i, j).
    void add(std::size_t i, std::size_t j, double value);

    double at(std::size_t i, std::size_t j) const;

    /// x' M x evaluated with the matrix exactly as stored (no symmetrization).
    double quad_form(const Bitstring& x) const;

    /// Sum of |M_ij| over all entries.
    double l1_norm() const;

    /// Sum of min(0, M_ij) over all entries.
    double negative_sum() const;

    bool all_finite() const;

    std::size_t nonzero_count() const;

    /// Visits every stored nonzero as f(i, j, value). Order unspecified.
    template <class F>
    void for_each(F&& f) const {
        if (!dense_) merge_triplets();
        if (dense_) {
            for (std::size_t i = 0; i < n_; ++i) {
                for (std::size_t j = 0; j < n_; ++j) {
                    const double v = values_[i * n_ + j];
                    if (v != 0.0) f(i, j, v);
                }
            }
        } else {
            for (const Triplet& t : triplets_) {
                if (t.value != 0.0) f(t.row, t.col, t.value);
            }
        }
    }

private:
    void merge_triplets() const;

    std::size_t n_ = 0;
    bool dense_ = true;
    std::vector<double> values_;              // dense, row-major
    mutable std::vector<Triplet> triplets_;   // sparse, lazily merged
    mutable bool merged_ = true;
};

} // namespace bigm

#endif // BIGM_MATRIX_HPP
