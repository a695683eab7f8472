#include "ilmm/joint_model.hpp"

#include <cmath>

#include "ilmm/errors.hpp"

namespace ilmm {

JointModel::JointModel(TenorGrid grid, VolSurface vols, std::vector<double> nominal_forwards,
                       std::vector<double> displaced_inflation)
    : grid_(std::move(grid)),
      vols_(std::move(vols)),
      f0_(std::move(nominal_forwards)),
      mu0_(std::move(displaced_inflation)) {
    const std::size_t n = grid_.periods();
    if (vols_.periods() != n) throw ModelError("vol surface grid does not match model grid");
    if (f0_.size() != n || mu0_.size() != n)
        throw ModelError("initial forward vectors must have one entry per grid period");
    for (std::size_t k = 0; k < n; ++k)
        if (!(f0_[k] > 0.0))
            throw ModelError("nominal forward f_" + std::to_string(k) + " must be positive");
    for (std::size_t j = 1; j <= n; ++j)
        if (!(mu0_[j - 1] > 0.0))
            throw ModelError("displaced inflation forward mu_" + std::to_string(j) +
                             " must be positive (inflation rate below -1/dT)");
}

JointModel JointModel::from_curves(const NominalCurve& nominal, const InflationCurve& inflation,
                                   const VolSurface& vols) {
    const TenorGrid& grid = vols.grid();
    return JointModel(grid, vols, initial_nominal_forwards(nominal, grid),
                      initial_displaced_inflation(inflation, grid));
}

std::vector<double> initial_nominal_forwards(const NominalCurve& nominal, const TenorGrid& grid) {
    std::vector<double> f(grid.periods());
    for (std::size_t k = 0; k < grid.periods(); ++k) {
        const double a = grid.accrual(k + 1);
        f[k] = (nominal.discount(grid.date(k)) / nominal.discount(grid.date(k + 1)) - 1.0) / a;
    }
    return f;
}

std::vector<double> initial_displaced_inflation(const InflationCurve& inflation,
                                                const TenorGrid& grid) {
    std::vector<double> mu(grid.periods());
    for (std::size_t j = 1; j <= grid.periods(); ++j)
        mu[j - 1] = inflation_forward(inflation, grid.date(j - 1), grid.date(j)) +
                    1.0 / grid.accrual(j);
    return mu;
}

std::vector<double> drift_weights(const TenorGrid& grid, std::span<const double> f) {
    std::vector<double> w(grid.periods());
    for (std::size_t k = 0; k < grid.periods(); ++k) {
        const double af = grid.accrual(k + 1) * f[k];
        w[k] = af / (1.0 + af);
    }
    return w;
}

void bond_vol(const VolSurface& vols, std::span<const double> w, std::size_t interval,
              std::size_t maturity_index, double* out) {
    const int d = vols.factors();
    for (int c = 0; c < d; ++c) out[c] = 0.0;
    for (std::size_t k = interval; k < maturity_index; ++k) {
        const double* g = vols.nominal_loading(k, interval);
        for (int c = 0; c < d; ++c) out[c] -= w[k] * g[c];
    }
}

std::vector<double> nominal_bond_vol(const VolSurface& vols, const NominalCurve& nominal,
                                     std::size_t j, double t) {
    const TenorGrid& grid = vols.grid();
    if (j >= grid.periods()) throw ModelError("nominal_bond_vol: index out of grid");
    if (!(t < grid.date(j))) throw ModelError("nominal_bond_vol: t must precede T_j");
    const auto f = initial_nominal_forwards(nominal, grid);
    const auto w = drift_weights(grid, f);
    std::vector<double> out(static_cast<std::size_t>(vols.factors()));
    bond_vol(vols, w, grid.next_index(t), j + 1, out.data());
    return out;
}

}  // namespace ilmm
