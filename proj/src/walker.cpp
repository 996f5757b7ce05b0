#include "bigm/walker.hpp"

namespace bigm {

EnergyWalker::EnergyWalker(const ProblemInstance& inst) : inst_(&inst) {
    const std::size_t n = inst.num_vars();
    sym_rows_.assign(n, {});
    diag_.assign(n, 0.0);
    inst.quad().for_each([&](std::size_t i, std::size_t j, double v) {
        if (i == j) {
            diag_[i] += v;
        } else {
            sym_rows_[i].push_back({static_cast<std::uint32_t>(j), v});
            sym_rows_[j].push_back({static_cast<std::uint32_t>(i), v});
        }
    });
    columns_.assign(n, {});
    const auto& rows = inst.constraints().rows;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        for (const auto& entry : rows[j]) {
            columns_[entry.col].push_back({static_cast<std::uint32_t>(j), entry.coeff});
        }
    }
    reset_zero();
}

void EnergyWalker::reset_zero() {
    x_.assign(inst_->num_vars(), 0);
    residuals_.assign(inst_->num_constraints(), 0);
    for (std::size_t j = 0; j < residuals_.size(); ++j) residuals_[j] = -inst_->rhs()[j];
    objective_ = 0.0;
    penalty_ = 0;
    for (const std::int64_t r : residuals_) penalty_ += r * r;
    flips_since_rebase_ = 0;
}

void EnergyWalker::reset(const Bitstring& x) {
    if (x.size() != inst_->num_vars())
        throw std::invalid_argument("EnergyWalker::reset: bitstring length mismatch");
    reset_zero();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i]) flip(i);
    }
    rebase();
}

double EnergyWalker::objective_delta(std::size_t i) const {
    double interaction = diag_[i];
    for (const SymEntry& e : sym_rows_[i]) {
        if (x_[e.col]) interaction += e.weight;
    }
    return x_[i] ? -interaction : interaction;
}

std::int64_t EnergyWalker::penalty_delta(std::size_t i) const {
    const std::int64_t sign = x_[i] ? -1 : 1;
    std::int64_t delta = 0;
    for (const ColEntry& e : columns_[i]) {
        const std::int64_t r_old = residuals_[e.row];
        const std::int64_t r_new = r_old + sign * e.coeff;
        delta += r_new * r_new - r_old * r_old;
    }
    return delta;
}

void EnergyWalker::flip(std::size_t i) {
    objective_ += objective_delta(i);
    const std::int64_t sign = x_[i] ? -1 : 1;
    for (const ColEntry& e : columns_[i]) {
        const std::int64_t r_old = residuals_[e.row];
        const std::int64_t r_new = r_old + sign * e.coeff;
        penalty_ += r_new * r_new - r_old * r_old;
        residuals_[e.row] = r_new;
    }
    x_[i] ^= 1u;
    if (++flips_since_rebase_ >= kRebaseInterval) rebase();
}

void EnergyWalker::rebase() {
    objective_ = inst_->quad().quad_form(x_);
    flips_since_rebase_ = 0;
}

} // namespace bigm
