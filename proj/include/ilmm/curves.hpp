#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ilmm {

enum class InterpRule { LogLinearDiscount };

enum class PillarKind { DiscountFactor, ZeroRate };

struct CurvePillar {
    double maturity;  // years
    double value;     // discount factor or continuously compounded zero rate
};

struct ZciisQuote {
    double maturity;  // years
    double rate;      // annually compounded swap rate, decimal
};

struct CpiFixing {
    double offset;  // year-fraction offset from valuation date, typically <= 0
    double level;   // index points
};

/// Shared interpolation core: pillars (T_i, ln P_i) with an implicit (0, 0),
/// linear in ln P. Beyond the last pillar the last forward rate is continued
/// flat, up to 1.25x the last maturity; beyond that queries are rejected.
class DiscountInterp {
public:
    DiscountInterp() = default;
    DiscountInterp(std::vector<double> maturities, std::vector<double> log_discounts,
                   std::string label);

    double log_discount(double t) const;
    double discount(double t) const;

    const std::vector<double>& maturities() const { return maturities_; }
    const std::vector<double>& log_discounts() const { return log_discounts_; }
    double last_maturity() const { return maturities_.back(); }

private:
    std::vector<double> maturities_;     // strictly increasing, first > 0
    std::vector<double> log_discounts_;  // ln P at each maturity
    std::string label_;
};

/// Nominal discount curve P(0,T). Strictly decreasing (nominal rates must be
/// positive), P(0,0) = 1.
class NominalCurve {
public:
    static NominalCurve build(const std::vector<CurvePillar>& pillars,
                              PillarKind kind = PillarKind::DiscountFactor,
                              InterpRule rule = InterpRule::LogLinearDiscount);
    /// Flat continuously compounded zero rate out to `last_maturity`.
    static NominalCurve flat(double zero_rate, double last_maturity);

    double discount(double t) const { return interp_.discount(t); }
    double log_discount(double t) const { return interp_.log_discount(t); }
    /// Simple forward rate over [t1, t2].
    double forward_rate(double t1, double t2) const;

    const DiscountInterp& interp() const { return interp_; }
    InterpRule rule() const { return rule_; }

private:
    DiscountInterp interp_;
    InterpRule rule_ = InterpRule::LogLinearDiscount;
};

/// Real discount curve P_R(0,T) with CPI base date T_0. Positive but not
/// required monotone (real rates may be negative).
class RealCurve {
public:
    static RealCurve build(const std::vector<CurvePillar>& pillars, double base_date = 0.0);

    double discount(double t) const { return interp_.discount(t); }
    double log_discount(double t) const { return interp_.log_discount(t); }
    double base_date() const { return base_date_; }

    const DiscountInterp& interp() const { return interp_; }

private:
    DiscountInterp interp_;
    double base_date_ = 0.0;
};

/// Inflation discount curve P_I(0,T) = P(0,T)/P_R(0,T), plus past CPI fixings
/// for seasoned instruments.
class InflationCurve {
public:
    static InflationCurve build(const NominalCurve& nominal, const RealCurve& real);

    double discount(double t) const { return interp_.discount(t); }
    double log_discount(double t) const { return interp_.log_discount(t); }

    void set_fixings(std::vector<CpiFixing> fixings);
    /// Published CPI at exactly `offset` (within 1e-9 years); throws
    /// CurveError("fixing required ...") otherwise. Fixings are point data;
    /// interpolating between publication dates is not supported.
    double fixing(double offset) const;
    bool has_fixing(double offset) const;
    const std::vector<CpiFixing>& fixings() const { return fixings_; }

    const DiscountInterp& interp() const { return interp_; }

private:
    DiscountInterp interp_;
    std::vector<CpiFixing> fixings_;  // sorted by offset
};

/// P_R(0,T) = P(0,T) (1+K(0,T))^T at each quoted maturity, interpolated in
/// log-discount space elsewhere.
RealCurve real_curve_from_zciis(const NominalCurve& nominal,
                                const std::vector<ZciisQuote>& quotes,
                                double base_date = 0.0);

/// Re-derive the fair ZCIIS rate K(0,T) = (P_R/P)^{1/T} - 1 from the curves.
double zciis_rate(const NominalCurve& nominal, const RealCurve& real, double maturity);

/// Simple forward inflation rate f^(I)(0,T1,T2). Handles seasoned periods:
/// for T2 <= 0 both endpoints must have CPI fixings; for T1 < 0 < T2 the
/// realized index ratio is spliced with the curve.
double inflation_forward(const InflationCurve& infl, double t1, double t2);

/// Forward price, set at time 0, to buy at T1 a real bond maturing at T2:
/// P_R(0,T2)/P_R(0,T1). Independent of the CPI base date.
double forward_real_bond_price(const RealCurve& real, double t1, double t2);

}  // namespace ilmm
