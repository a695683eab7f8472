#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ilmm/tenor_grid.hpp"

namespace ilmm {

/// Factor correlation. Either the loadings already embed correlation against
/// identity factors, or (two-factor case) a single correlation between the
/// nominal factor and the inflation factor, optionally piecewise in time.
class CorrelationSpec {
public:
    static CorrelationSpec identity();
    static CorrelationSpec two_factor(double rho);
    /// rho_i applies on the calendar interval [T_{i-1}, T_i); rho[0] is reused
    /// for any stub before the first grid date.
    static CorrelationSpec two_factor_piecewise(std::vector<double> rho);

    bool is_identity() const { return identity_; }
    double rho(std::size_t interval) const;
    const std::vector<double>& rho_pieces() const { return rho_; }

private:
    bool identity_ = true;
    std::vector<double> rho_;  // indexed by interval, size >= 1 when two-factor
};

/// Piecewise-constant factor loadings for the joint dynamics.
///
/// Indexing: the grid has dates T_0..T_N. Calendar interval i >= 1 is
/// [T_{i-1}, T_i); interval 0 is the stub before T_0 (used only by grids that
/// start in the future). Nominal forward k spans [T_k, T_{k+1}] and fixes at
/// T_k, so its loading gamma_k(t) lives on intervals 0..k. Inflation forward j
/// spans [T_{j-1}, T_j] and fixes at T_j (the end of its own period), so
/// gamma^I_j(t) lives on intervals 0..j. Loadings are zero after the fixing.
class VolSurface {
public:
    VolSurface() = default;
    VolSurface(TenorGrid grid, int factors, double norm_cap = 5.0);

    const TenorGrid& grid() const { return grid_; }
    int factors() const { return factors_; }
    std::size_t periods() const { return grid_.periods(); }

    void set_nominal_loading(std::size_t k, std::size_t interval, std::span<const double> v);
    void set_inflation_loading(std::size_t j, std::size_t interval, std::span<const double> v);

    /// Pointer to `factors()` doubles; zero vector outside the alive range.
    const double* nominal_loading(std::size_t k, std::size_t interval) const;
    const double* inflation_loading(std::size_t j, std::size_t interval) const;

    /// Interval index containing time t: grid.next_index(t).
    std::size_t interval_of(double t) const { return grid_.next_index(t); }

    /// int_{max(0,from)}^{T_j} ||gamma^I_j(s)||^2 ds over the piecewise grid.
    double inflation_variance(std::size_t j, double from = 0.0) const;
    /// Annualized implied caplet volatility sigma_j = sqrt(variance / T_j).
    double implied_caplet_vol(std::size_t j) const;

    /// Two-factor setup: factor 1 drives all nominal forwards, factor 2 the
    /// inflation forwards, with correlation embedded into the inflation
    /// loadings as |g| (rho, sqrt(1-rho^2)). Vols are flat in time.
    static VolSurface two_factor(const TenorGrid& grid, const std::vector<double>& nominal_vol,
                                 const std::vector<double>& inflation_vol,
                                 const CorrelationSpec& corr);
    /// Same embedding with inflation vols piecewise in time:
    /// inflation_vol[j-1][i] applies to forward j on interval i.
    static VolSurface two_factor_piecewise(const TenorGrid& grid,
                                           const std::vector<double>& nominal_vol,
                                           const std::vector<std::vector<double>>& inflation_vol,
                                           const CorrelationSpec& corr);

private:
    std::size_t nom_index(std::size_t k, std::size_t interval) const;
    std::size_t inf_index(std::size_t j, std::size_t interval) const;
    void check_loading(std::span<const double> v) const;

    TenorGrid grid_;
    int factors_ = 0;
    double norm_cap_ = 5.0;
    // [rate][interval][factor], contiguous; intervals 0..N
    std::vector<double> nominal_;
    std::vector<double> inflation_;
};

}  // namespace ilmm
