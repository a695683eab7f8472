#pragma once

#include <span>
#include <vector>

#include "ilmm/curves.hpp"
#include "ilmm/tenor_grid.hpp"
#include "ilmm/vol_surface.hpp"

namespace ilmm {

/// Joint state of the two forward streams at valuation:
/// nominal forwards f_k over [T_k, T_{k+1}] (k = 0..N-1) and displaced
/// inflation forwards mu_j = f^I_j + 1/dT_j over [T_{j-1}, T_j] (j = 1..N,
/// stored at j-1). Immutable once built.
class JointModel {
public:
    JointModel(TenorGrid grid, VolSurface vols, std::vector<double> nominal_forwards,
               std::vector<double> displaced_inflation);

    static JointModel from_curves(const NominalCurve& nominal, const InflationCurve& inflation,
                                  const VolSurface& vols);

    const TenorGrid& grid() const { return grid_; }
    const VolSurface& vols() const { return vols_; }
    std::size_t periods() const { return grid_.periods(); }
    int factors() const { return vols_.factors(); }

    double nominal_forward(std::size_t k) const { return f0_[k]; }
    double displaced_inflation(std::size_t j) const { return mu0_[j - 1]; }
    const std::vector<double>& nominal_forwards() const { return f0_; }
    const std::vector<double>& displaced_inflations() const { return mu0_; }

private:
    TenorGrid grid_;
    VolSurface vols_;
    std::vector<double> f0_;
    std::vector<double> mu0_;
};

/// f_k(0) = (P(0,T_k)/P(0,T_{k+1}) - 1)/dT_{k+1} for k = 0..N-1.
std::vector<double> initial_nominal_forwards(const NominalCurve& nominal, const TenorGrid& grid);

/// mu_j(0) = f^I_j(0) + 1/dT_j for j = 1..N (returned at index j-1).
std::vector<double> initial_displaced_inflation(const InflationCurve& inflation,
                                                const TenorGrid& grid);

/// Drift weights w_k = dT_{k+1} f_k / (1 + dT_{k+1} f_k) for a given state.
std::vector<double> drift_weights(const TenorGrid& grid, std::span<const double> f);

/// Volatility vector of the zero-coupon bond P(t, T_M) implied by the forward
/// loadings and the state f at time t (interval = eta_t):
///   Sigma_M(t) = - sum_{k=eta_t}^{M-1} w_k gamma_k(t).
/// Writes `factors` doubles into out.
void bond_vol(const VolSurface& vols, std::span<const double> w, std::size_t interval,
              std::size_t maturity_index, double* out);

/// Static query on the initial curve: Sigma_{j+1}(t), the vol of
/// P(t, T_{j+1}), with weights evaluated from `nominal` at time 0.
std::vector<double> nominal_bond_vol(const VolSurface& vols, const NominalCurve& nominal,
                                     std::size_t j, double t);

}  // namespace ilmm
