#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ilmm/vol_surface.hpp"

namespace ilmm {

/// Bond volatility term structure as a callable: (t, T) -> d-dimensional vector.
using BondVolFn = std::function<std::vector<double>(double t, double T)>;

/// No-arbitrage consistency residual on real-bond volatilities:
///   (Sigma_R(t,T2) - Sigma_R(t,T1)) . (Sigma(t,T1) - Sigma_R(t,T1)).
/// Zero is required for the two forward-real-bond dynamics to coexist.
double consistency_residual(const BondVolFn& sigma_nominal, const BondVolFn& sigma_real,
                            double t, double t1, double t2);

/// Infinitesimal form dSigma_R/dT . Sigma_I at maturity T, via a central
/// finite difference of width fd_step.
double consistency_residual_infinitesimal(const BondVolFn& sigma_nominal,
                                          const BondVolFn& sigma_real, double t, double T,
                                          double fd_step = 1e-4);

/// Drift of the forward real bond price F_R(t,T1,T2) under the risk-neutral
/// measure, written against the nominal-bond numeraire route (percentage
/// drift; the two expressions differ exactly by the consistency residual).
double fr_drift_via_nominal(const BondVolFn& sigma_nominal, const BondVolFn& sigma_real,
                            double t, double t1, double t2);
double fr_drift_via_real(const BondVolFn& sigma_nominal, const BondVolFn& sigma_real,
                         double t, double t1, double t2);

struct JyDriftReport {
    /// max absolute no-arbitrage residual over boundary pairs up to the expiry
    double max_consistency_residual = 0.0;
    /// max |sigma_R reconstructed by differencing Sigma - Sigma_I minus
    /// (sigma - sigma^I)| over period midpoints
    double max_sigma_r_mismatch = 0.0;
    /// max |drift by differencing the real-bond vol curve minus the
    /// instantaneous-real-forward drift with zero CPI volatility|
    double max_drift_mismatch = 0.0;
    /// period midpoints tested and the real-forward drift there
    std::vector<double> midpoints;
    std::vector<double> real_drift;
};

/// Verifies on the discrete surface that the instantaneous real-forward
/// dynamics reconstructed from the two forward streams match the
/// real-forward-rate drift with zero CPI volatility. Throws ModelError when
/// the consistency residual exceeds `consistency_tol` (the equivalence only
/// holds on consistent surfaces).
JyDriftReport jy_drift_check(const VolSurface& vols, std::span<const double> nominal_forwards,
                             double t, double expiry, double fd_step = 1e-4,
                             double consistency_tol = 1e-10);

/// Bond-vol callables implied by a discrete surface and a forward state at
/// observation time t: piecewise-linear in maturity, anchored at Sigma(t,t)=0.
BondVolFn discrete_nominal_bond_vol(const VolSurface& vols, std::vector<double> nominal_forwards);
BondVolFn discrete_real_bond_vol(const VolSurface& vols, std::vector<double> nominal_forwards);

}  // namespace ilmm
