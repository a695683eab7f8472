#pragma once

#include <string>
#include <vector>

#include "ilmm/curves.hpp"
#include "ilmm/tenor_grid.hpp"
#include "ilmm/vol_surface.hpp"

namespace ilmm {

/// Undiscounted Black call/put on a displaced forward:
/// call = F Phi(d1) - K Phi(d2) with d1 = (ln(F/K) + s^2/2)/s, s = sigma sqrt(T).
/// s = 0 returns the intrinsic value (limit case, not an error).
double black_call(double forward, double strike, double stdev);
double black_put(double forward, double strike, double stdev);

/// value = notional [P_R(0,T) - P(0,T)(1+K)^T]; zero when K is the fair quote.
double price_zciis(const NominalCurve& nominal, const RealCurve& real, double strike,
                   double maturity, double notional);

/// value = notional sum_j dT_j P(0,T_j) (f^I_j(0) - K) over the schedule.
/// Model-free: no volatility input, no convexity adjustment.
double price_yyiis(const NominalCurve& nominal, const InflationCurve& inflation,
                   const TenorGrid& schedule, double strike, double notional);

/// Year-on-year caplet j on the surface grid, paying
/// dT_j (f^I_j(T_j) - K)^+ at T_j. Seasoned periods (T_{j-1} < 0 <= T_j)
/// use the CPI-fixing-adjusted forward and accrue variance over [0, T_j].
double price_caplet(const NominalCurve& nominal, const InflationCurve& inflation,
                    const VolSurface& vols, std::size_t j, double strike, double notional);
double price_floorlet(const NominalCurve& nominal, const InflationCurve& inflation,
                      const VolSurface& vols, std::size_t j, double strike, double notional);

/// Cap/floor over caplets j = 1..n_periods.
double price_cap(const NominalCurve& nominal, const InflationCurve& inflation,
                 const VolSurface& vols, std::size_t n_periods, double strike, double notional);
double price_floor(const NominalCurve& nominal, const InflationCurve& inflation,
                   const VolSurface& vols, std::size_t n_periods, double strike, double notional);

/// Forward inflation swap rate machinery over [T_m, T_n].
struct SwapRateView {
    std::size_t m = 0, n = 0;
    double swap_rate = 0.0;        // S_{m,n}(0)
    double annuity = 0.0;          // A_{m,n}(0) per unit notional
    double inv_accrual = 0.0;      // 1/dT_{m,n} = sum omega_i / dT_i
    std::vector<double> omega;     // weights, sum to 1 (index i-m-1)
    std::vector<double> alpha;     // displaced weights, sum to 1
    std::vector<double> mu;        // displaced expectations mu_i(0)
};

SwapRateView swap_rate_view(const NominalCurve& nominal, const InflationCurve& inflation,
                            const TenorGrid& grid, std::size_t m, std::size_t n);

/// Frozen-coefficient swaption volatility: the time integral of
/// || sum_i [alpha_i g^I_i(s) + (alpha_i - omega_i) Sigma_i(s)] ||^2
/// over [0, T_m], with weights frozen at time 0.
double swaption_vol(const NominalCurve& nominal, const VolSurface& vols,
                    const SwapRateView& view);

/// Payer year-on-year inflation swaption, expiry T_m over [T_m, T_n]:
/// notional A(0) [ (S + 1/dT) Phi(d1) - (K + 1/dT) Phi(d2) ].
double price_swaption(const NominalCurve& nominal, const InflationCurve& inflation,
                      const VolSurface& vols, std::size_t m, std::size_t n, double strike,
                      double notional);

/// Invert the caplet formula for the annualized volatility. The price must
/// lie inside [intrinsic, dT P mu]; outside that band an ArbitrageError names
/// the bound.
double implied_caplet_vol(const NominalCurve& nominal, const InflationCurve& inflation,
                          const TenorGrid& grid, std::size_t j, double strike, double price,
                          double notional = 1.0);

struct Instrument {
    enum class Kind { Zciis, Yyiis, Caplet, Floorlet, Cap, Floor, Swaption };
    std::string id;
    Kind kind = Kind::Zciis;
    double start = 0.0;   // years; swaption expiry T_m, otherwise schedule start
    double end = 0.0;     // years; schedule/swap end
    double freq = 1.0;    // payment frequency (years)
    double strike = 0.0;  // decimal rate
    double notional = 1.0;

    static Kind parse_kind(const std::string& s);
    static std::string kind_name(Kind k);
};

struct PriceRecord {
    std::string id;
    std::string kind;
    bool ok = false;
    double value = 0.0;
    double per_notional = 0.0;
    double vol_used = 0.0;  // annualized, 0 for curve-only instruments
    std::string error;
};

/// Prices one book row on the shared market (curves + surface). The
/// instrument schedule must line up with the surface grid for vol-dependent
/// kinds. Errors are captured per record, not thrown.
PriceRecord price_instrument(const NominalCurve& nominal, const RealCurve& real,
                             const InflationCurve& inflation, const VolSurface& vols,
                             const Instrument& instr);

}  // namespace ilmm
