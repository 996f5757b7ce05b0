#include "bigm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bigm {

EnergyMatrix::EnergyMatrix(std::size_t n, Storage storage) : n_(n) {
    switch (storage) {
    case Storage::dense: dense_ = true; break;
    case Storage::sparse: dense_ = false; break;
    case Storage::automatic: dense_ = n <= kDenseLimit; break;
    }
    if (dense_) values_.assign(n_ * n_, 0.0);
}

void EnergyMatrix::add(std::size_t i, std::size_t j, double value) {
    if (i >= n_ || j >= n_) throw std::out_of_range("EnergyMatrix::add: index out of range");
    if (value == 0.0) return;
    if (dense_) {
        values_[i * n_ + j] += value;
    } else {
        triplets_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), value});
        merged_ = false;
    }
}

void EnergyMatrix::merge_triplets() const {
    if (merged_) return;
    std::sort(triplets_.begin(), triplets_.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::size_t out = 0;
    for (std::size_t i = 0; i < triplets_.size(); ++i) {
        if (out > 0 && triplets_[out - 1].row == triplets_[i].row &&
            triplets_[out - 1].col == triplets_[i].col) {
            triplets_[out - 1].value += triplets_[i].value;
        } else {
            triplets_[out++] = triplets_[i];
        }
    }
    triplets_.resize(out);
    merged_ = true;
}

double EnergyMatrix::at(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) throw std::out_of_range("EnergyMatrix::at: index out of range");
    if (dense_) return values_[i * n_ + j];
    merge_triplets();
    for (const Triplet& t : triplets_) {
        if (t.row == i && t.col == j) return t.value;
    }
    return 0.0;
}

double EnergyMatrix::quad_form(const Bitstring& x) const {
    if (x.size() != n_) throw std::invalid_argument("quad_form: bitstring length mismatch");
    double acc = 0.0;
    if (dense_) {
        for (std::size_t i = 0; i < n_; ++i) {
            if (!x[i]) continue;
            const double* row = values_.data() + i * n_;
            double row_acc = 0.0;
            for (std::size_t j = 0; j < n_; ++j) {
                if (x[j]) row_acc += row[j];
            }
            acc += row_acc;
        }
    } else {
        merge_triplets();
        for (const Triplet& t : triplets_) {
            if (x[t.row] && x[t.col]) acc += t.value;
        }
    }
    return acc;
}

double EnergyMatrix::l1_norm() const {
    double acc = 0.0;
    for_each([&](std::size_t, std::size_t, double v) { acc += std::abs(v); });
    return acc;
}

double EnergyMatrix::negative_sum() const {
    double acc = 0.0;
    for_each([&](std::size_t, std::size_t, double v) {
        if (v < 0.0) acc += v;
    });
    return acc;
}

bool EnergyMatrix::all_finite() const {
    bool ok = true;
    for_each([&](std::size_t, std::size_t, double v) { ok = ok && std::isfinite(v); });
    return ok;
}

std::size_t EnergyMatrix::nonzero_count() const {
    std::size_t count = 0;
    for_each([&](std::size_t, std::size_t, double) { ++count; });
    return count;
}

} // namespace bigm
