#include "ilmm/vol_surface.hpp"

#include <algorithm>
#include <cmath>

#include "ilmm/errors.hpp"

namespace ilmm {

CorrelationSpec CorrelationSpec::identity() { return CorrelationSpec{}; }

CorrelationSpec CorrelationSpec::two_factor(double rho) {
    return two_factor_piecewise({rho});
}

CorrelationSpec CorrelationSpec::two_factor_piecewise(std::vector<double> rho) {
    if (rho.empty()) throw ModelError("correlation: empty piecewise vector");
    for (double r : rho)
        if (!(r >= -1.0 && r <= 1.0)) throw ModelError("correlation must lie in [-1, 1]");
    CorrelationSpec c;
    c.identity_ = false;
    c.rho_ = std::move(rho);
    return c;
}

double CorrelationSpec::rho(std::size_t interval) const {
    if (identity_) throw ModelError("identity correlation has no scalar rho");
    if (interval == 0) return rho_.front();
    return rho_[std::min(interval - 1, rho_.size() - 1)];
}

VolSurface::VolSurface(TenorGrid grid, int factors, double norm_cap)
    : grid_(std::move(grid)), factors_(factors), norm_cap_(norm_cap) {
    if (factors_ < 1) throw ModelError("vol surface needs at least one factor");
    const std::size_t cells = grid_.periods() * (grid_.size() + 0) * static_cast<std::size_t>(factors_);
    nominal_.assign(cells, 0.0);
    inflation_.assign(cells, 0.0);
}

std::size_t VolSurface::nom_index(std::size_t k, std::size_t interval) const {
    // k in [0, N-1], interval in [0, N]
    return (k * grid_.size() + interval) * static_cast<std::size_t>(factors_);
}

std::size_t VolSurface::inf_index(std::size_t j, std::size_t interval) const {
    // j in [1, N] stored at j-1
    return ((j - 1) * grid_.size() + interval) * static_cast<std::size_t>(factors_);
}

void VolSurface::check_loading(std::span<const double> v) const {
    if (v.size() != static_cast<std::size_t>(factors_))
        throw ModelError("loading dimension mismatch");
    double n2 = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) throw ModelError("non-finite vol loading");
        n2 += x * x;
    }
    if (n2 > norm_cap_ * norm_cap_)
        throw ModelError("vol loading norm exceeds cap " + std::to_string(norm_cap_) +
                         " (check units: loadings are per sqrt(year))");
}

void VolSurface::set_nominal_loading(std::size_t k, std::size_t interval,
                                     std::span<const double> v) {
    if (k >= grid_.periods()) throw ModelError("nominal forward index out of grid");
    if (interval > k)
        throw ModelError("nominal loading after own fixing (interval > k)");
    check_loading(v);
    std::copy(v.begin(), v.end(), nominal_.begin() + static_cast<std::ptrdiff_t>(nom_index(k, interval)));
}

void VolSurface::set_inflation_loading(std::size_t j, std::size_t interval,
                                       std::span<const double> v) {
    if (j < 1 || j > grid_.periods()) throw ModelError("inflation forward index out of grid");
    if (interval > j)
        throw ModelError("inflation loading after own fixing (interval > j)");
    check_loading(v);
    std::copy(v.begin(), v.end(), inflation_.begin() + static_cast<std::ptrdiff_t>(inf_index(j, interval)));
}

const double* VolSurface::nominal_loading(std::size_t k, std::size_t interval) const {
    return nominal_.data() + nom_index(k, interval);
}

const double* VolSurface::inflation_loading(std::size_t j, std::size_t interval) const {
    return inflation_.data() + inf_index(j, interval);
}

double VolSurface::inflation_variance(std::size_t j, double from) const {
    if (j < 1 || j > grid_.periods()) throw ModelError("inflation forward index out of grid");
    const double lo = std::max(from, 0.0);
    double var = 0.0;
    // stub before T_0
    if (grid_.front() > lo) {
        const double* g = inflation_loading(j, 0);
        double n2 = 0.0;
        for (int f = 0; f < factors_; ++f) n2 += g[f] * g[f];
        var += n2 * (grid_.front() - lo);
    }
    for (std::size_t i = 1; i <= j; ++i) {
        const double a = std::min(grid_.date(i), grid_.date(j)) - std::max(grid_.date(i - 1), lo);
        if (a <= 0.0) continue;
        const double* g = inflation_loading(j, i);
        double n2 = 0.0;
        for (int f = 0; f < factors_; ++f) n2 += g[f] * g[f];
        var += n2 * a;
    }
    return var;
}

double VolSurface::implied_caplet_vol(std::size_t j) const {
    const double tj = grid_.date(j);
    if (!(tj > 0.0)) throw ModelError("caplet vol undefined for non-positive expiry");
    return std::sqrt(inflation_variance(j) / tj);
}

VolSurface VolSurface::two_factor(const TenorGrid& grid, const std::vector<double>& nominal_vol,
                                  const std::vector<double>& inflation_vol,
                                  const CorrelationSpec& corr) {
    std::vector<std::vector<double>> pw(inflation_vol.size());
    for (std::size_t j = 0; j < inflation_vol.size(); ++j)
        pw[j].assign(grid.size(), inflation_vol[j]);
    return two_factor_piecewise(grid, nominal_vol, pw, corr);
}

VolSurface VolSurface::two_factor_piecewise(const TenorGrid& grid,
                                            const std::vector<double>& nominal_vol,
                                            const std::vector<std::vector<double>>& inflation_vol,
                                            const CorrelationSpec& corr) {
    const std::size_t n = grid.periods();
    if (nominal_vol.size() != n || inflation_vol.size() != n)
        throw ModelError("two_factor: vol vectors must have one entry per grid period");
    VolSurface s(grid, 2);
    for (std::size_t k = 0; k < n; ++k) {
        const double v[2] = {nominal_vol[k], 0.0};
        for (std::size_t i = 0; i <= k; ++i) s.set_nominal_loading(k, i, v);
    }
    for (std::size_t j = 1; j <= n; ++j) {
        for (std::size_t i = 0; i <= j; ++i) {
            const double g = inflation_vol[j - 1][std::min(i, inflation_vol[j - 1].size() - 1)];
            const double r = corr.is_identity() ? 0.0 : corr.rho(i);
            const double v[2] = {g * r, g * std::sqrt(1.0 - r * r)};
            s.set_inflation_loading(j, i, v);
        }
    }
    return s;
}

}  // namespace ilmm
