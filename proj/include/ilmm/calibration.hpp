#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ilmm/curves.hpp"
#include "ilmm/tenor_grid.hpp"
#include "ilmm/vol_surface.hpp"

namespace ilmm {

struct CapQuote {
    double maturity;  // years (grid date)
    double strike;    // decimal
    double price;     // per unit notional (decimal, not bps)
};

struct CalibrationTarget {
    enum class Kind { CapletVol, CapPrice, SwaptionVol };
    Kind kind = Kind::CapletVol;
    std::size_t index = 0;  // caplet j, or cap maturity index
    std::size_t m = 0;      // swaption span start
    std::size_t n = 0;      // swaption span end
    double value = 0.0;     // annualized vol, or cap price per unit notional
    double weight = 1.0;

    static CalibrationTarget caplet_vol(std::size_t j, double sigma, double w = 1.0);
    static CalibrationTarget cap_price(std::size_t n, double strike, double price, double w = 1.0);
    static CalibrationTarget swaption_vol(std::size_t m, std::size_t n, double sigma,
                                          double w = 1.0);
    double strike = 0.0;  // cap-price targets only
};

struct BootstrapResult {
    std::vector<double> caplet_vols;                        // sigma_j at [j-1]
    std::vector<std::pair<std::size_t, std::size_t>> strips;  // caplet index ranges [a, b]
};

/// Consecutive bootstrap of implied caplet vols from cap quotes at one strike.
/// Each strip between adjacent quoted maturities shares a single sigma found
/// by root-finding on the strip price Cap(b) - Cap(a); the first quoted
/// maturity seeds all caplets up to it with one shared sigma. Repricing every
/// input cap is exact by construction.
BootstrapResult bootstrap_caplet_vols(const NominalCurve& nominal,
                                      const InflationCurve& inflation, const TenorGrid& grid,
                                      const std::vector<CapQuote>& quotes);

struct CalibrationOptions {
    double alpha = 1.0;             // smoothness weight on adjacent-maturity vols
    double beta = 1.0;              // smoothness weight on piecewise correlation
    bool solve_rho = false;
    double rho = 0.0;               // fixed correlation when not solving
    bool time_homogeneous = true;   // gamma^I_j(t) = sigma_j constant in t
    int max_iterations = 500;
    double constraint_tol = 1e-8;   // relative
    double stationarity_tol = 1e-10;
    /// nominal forward vols per grid period (factor 1), flat in time
    std::vector<double> nominal_vol;
};

struct IterationRecord {
    int outer = 0;
    int inner = 0;
    double merit = 0.0;
    double objective = 0.0;
    double max_violation = 0.0;  // relative
};

struct CalibrationResult {
    VolSurface surface;
    /// calibrated loadings: [j-1][interval i], i = 1..j (time-homogeneous
    /// solutions repeat the per-maturity value)
    std::vector<std::vector<double>> inflation_vols;
    std::vector<double> rho;        // piecewise rho_i; single entry when fixed
    /// per target: integral(model) - sigma^2 (T - t), the constraint equation
    /// left-minus-right with the model on the left
    std::vector<double> residuals;
    std::vector<double> residuals_relative;
    double objective = 0.0;
    bool converged = false;
    std::string message;
    std::vector<IterationRecord> iterations;
};

/// Regularized non-parametric calibration: minimize
///   alpha sum_j (g_j - g_{j-1})^2 [+ beta sum_i (rho_i - rho_{i-1})^2]
/// subject to the quadratic vol-matching constraints, solved by an augmented
/// Lagrangian with projected Newton inner iterations. Loadings are
/// constrained nonnegative (the factor sign is unidentifiable) and rho to
/// [-1, 1].
CalibrationResult calibrate_nonparametric(const NominalCurve& nominal,
                                          const InflationCurve& inflation, const TenorGrid& grid,
                                          std::vector<CalibrationTarget> targets,
                                          const CalibrationOptions& options);

/// Joint solve with piecewise correlation free. Requires at least one
/// swaption target (caplets alone carry no cross-sensitivity).
CalibrationResult implied_correlation(const NominalCurve& nominal,
                                      const InflationCurve& inflation, const TenorGrid& grid,
                                      std::vector<CalibrationTarget> targets,
                                      const CalibrationOptions& options);

}  // namespace ilmm
