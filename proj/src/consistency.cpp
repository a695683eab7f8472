#include "ilmm/consistency.hpp"

#include <algorithm>
#include <cmath>

#include "ilmm/errors.hpp"
#include "ilmm/joint_model.hpp"

namespace ilmm {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> sub(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

/// Piecewise-constant forward-vol densities implied by the discrete surface
/// at observation time t (weights from the supplied forward state).
struct Densities {
    const TenorGrid* grid;
    double t;
    std::size_t itv;
    int d;
    std::vector<double> nom;  // [period][factor], period 1..N at (p-1)*d
    std::vector<double> inf;

    Densities(const VolSurface& vols, std::span<const double> f, double t_)
        : grid(&vols.grid()), t(t_), itv(vols.grid().next_index(t_)), d(vols.factors()) {
        const std::size_t n = grid->periods();
        const auto w = drift_weights(*grid, f);
        nom.assign(n * static_cast<std::size_t>(d), 0.0);
        inf.assign(n * static_cast<std::size_t>(d), 0.0);
        for (std::size_t p = 1; p <= n; ++p) {
            const double a = grid->accrual(p);
            if (p >= itv + 1) {
                const double* g = vols.nominal_loading(p - 1, itv);
                for (int c = 0; c < d; ++c) nom[(p - 1) * d + c] = w[p - 1] * g[c] / a;
            }
            if (p >= itv) {
                const double* g = vols.inflation_loading(p, itv);
                for (int c = 0; c < d; ++c) inf[(p - 1) * d + c] = g[c] / a;
            }
        }
    }

    // minus the integral of the density from t to T
    std::vector<double> big_sigma(const std::vector<double>& dens, double T) const {
        std::vector<double> out(static_cast<std::size_t>(d), 0.0);
        const std::size_t n = grid->periods();
        for (std::size_t p = 1; p <= n; ++p) {
            const double lo = std::max(grid->date(p - 1), t);
            const double hi = std::min(grid->date(p), T);
            if (hi <= lo) continue;
            for (int c = 0; c < d; ++c) out[c] -= (hi - lo) * dens[(p - 1) * d + c];
        }
        return out;
    }
};

}  // namespace

double consistency_residual(const BondVolFn& sigma_nominal, const BondVolFn& sigma_real,
                            double t, double t1, double t2) {
    const auto sr1 = sigma_real(t, t1);
    const auto sr2 = sigma_real(t, t2);
    const auto sn1 = sigma_nominal(t, t1);
    return dot(sub(sr2, sr1), sub(sn1, sr1));
}

double consistency_residual_infinitesimal(const BondVolFn& sigma_nominal,
                                          const BondVolFn& sigma_real, double t, double T,
                                          double fd_step) {
    const auto up = sigma_real(t, T + fd_step);
    const auto dn = sigma_real(t, T - fd_step);
    std::vector<double> dsr(up.size());
    for (std::size_t i = 0; i < up.size(); ++i) dsr[i] = (up[i] - dn[i]) / (2.0 * fd_step);
    return dot(dsr, sub(sigma_nominal(t, T), sigma_real(t, T)));
}

double fr_drift_via_nominal(const BondVolFn& sigma_nominal, const BondVolFn& sigma_real,
                            double t, double t1, double t2) {
    return dot(sub(sigma_real(t, t2), sigma_real(t, t1)), sigma_nominal(t, t1)) * -1.0;
}

double fr_drift_via_real(const BondVolFn& sigma_nominal, const BondVolFn& sigma_real,
                         double t, double t1, double t2) {
    (void)sigma_nominal;
    return dot(sub(sigma_real(t, t2), sigma_real(t, t1)), sigma_real(t, t1)) * -1.0;
}

BondVolFn discrete_nominal_bond_vol(const VolSurface& vols, std::vector<double> f) {
    return [vols, f = std::move(f)](double t, double T) {
        Densities dn(vols, f, t);
        return dn.big_sigma(dn.nom, T);
    };
}

BondVolFn discrete_real_bond_vol(const VolSurface& vols, std::vector<double> f) {
    return [vols, f = std::move(f)](double t, double T) {
        Densities dn(vols, f, t);
        const auto s = dn.big_sigma(dn.nom, T);
        const auto si = dn.big_sigma(dn.inf, T);
        return sub(s, si);
    };
}

JyDriftReport jy_drift_check(const VolSurface& vols, std::span<const double> nominal_forwards,
                             double t, double expiry, double fd_step, double consistency_tol) {
    const TenorGrid& grid = vols.grid();
    const int d = vols.factors();
    Densities dens(vols, nominal_forwards, t);

    auto sigma_r_at = [&](double T) {
        const auto s = dens.big_sigma(dens.nom, T);
        const auto si = dens.big_sigma(dens.inf, T);
        return sub(s, si);
    };

    JyDriftReport report;

    std::vector<double> boundaries;
    for (std::size_t p = dens.itv; p <= grid.periods() && grid.date(p) <= expiry + 1e-12; ++p)
        boundaries.push_back(grid.date(p));
    if (boundaries.size() < 1)
        throw ModelError("jy_drift_check: expiry leaves no grid period to test");

    // no-arbitrage residual over boundary pairs, with the nominal callable on the
    // same discrete construction
    for (std::size_t a = 0; a < boundaries.size(); ++a) {
        for (std::size_t b = a + 1; b < boundaries.size(); ++b) {
            const auto sr1 = sigma_r_at(boundaries[a]);
            const auto sr2 = sigma_r_at(boundaries[b]);
            const auto sn1 = dens.big_sigma(dens.nom, boundaries[a]);
            const double r = dot(sub(sr2, sr1), sub(sn1, sr1));
            report.max_consistency_residual = std::max(report.max_consistency_residual, std::fabs(r));
        }
    }
    if (report.max_consistency_residual > consistency_tol)
        throw ModelError("jy_drift_check: consistency residual " +
                         std::to_string(report.max_consistency_residual) +
                         " exceeds tolerance; the real-forward equivalence requires a "
                         "consistent surface");

    // period midpoints: compare densities and drifts reconstructed two ways
    for (std::size_t p = dens.itv; p <= grid.periods(); ++p) {
        const double lo = std::max(grid.date(p - 1), t);
        const double hi = grid.date(p);
        if (hi > expiry + 1e-12) break;
        const double tm = 0.5 * (lo + hi);
        const double h = std::min(fd_step, 0.25 * (hi - lo));

        const auto srm = sigma_r_at(tm);   // Sigma_R at midpoint
        const auto up = sigma_r_at(tm + h);
        const auto dn_ = sigma_r_at(tm - h);

        double drift_fd = 0.0, drift_e328 = 0.0, mism = 0.0;
        for (int c = 0; c < d; ++c) {
            const double sigma_c = dens.nom[(p - 1) * static_cast<std::size_t>(d) + c];
            const double sigma_i_c = dens.inf[(p - 1) * static_cast<std::size_t>(d) + c];
            const double sigma_r_direct = sigma_c - sigma_i_c;
            const double sigma_r_fd = -(up[c] - dn_[c]) / (2.0 * h);
            mism = std::max(mism, std::fabs(sigma_r_fd - sigma_r_direct));
            // d Sigma_R/dT . Sigma_R  vs  sigma_R . integral(sigma_R)
            drift_fd += -sigma_r_fd * srm[c];
            drift_e328 += sigma_r_direct * (-srm[c]);
        }
        report.max_sigma_r_mismatch = std::max(report.max_sigma_r_mismatch, mism);
        report.max_drift_mismatch =
            std::max(report.max_drift_mismatch, std::fabs(drift_fd - drift_e328));
        report.midpoints.push_back(tm);
        report.real_drift.push_back(drift_e328);
    }
    return report;
}

}  // namespace ilmm
