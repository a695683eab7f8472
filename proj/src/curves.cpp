#include "ilmm/curves.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ilmm/errors.hpp"

namespace ilmm {

namespace {
constexpr double kExtrapolationFactor = 1.25;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}
}  // namespace

DiscountInterp::DiscountInterp(std::vector<double> maturities,
                               std::vector<double> log_discounts, std::string label)
    : maturities_(std::move(maturities)),
      log_discounts_(std::move(log_discounts)),
      label_(std::move(label)) {
    if (maturities_.empty() || maturities_.size() != log_discounts_.size())
        throw CurveError(label_ + ": empty or mismatched pillar arrays");
    double prev = 0.0;
    for (std::size_t i = 0; i < maturities_.size(); ++i) {
        if (!(maturities_[i] > prev))
            throw CurveError(label_ + ": pillar maturities must be strictly increasing and positive");
        if (!std::isfinite(log_discounts_[i]))
            throw CurveError(label_ + ": non-finite discount factor");
        prev = maturities_[i];
    }
}

double DiscountInterp::log_discount(double t) const {
    if (t < 0.0) throw CurveError(label_ + ": query at negative maturity " + fmt(t));
    if (t == 0.0) return 0.0;
    const double last = maturities_.back();
    if (t > last * kExtrapolationFactor)
        throw CurveError(label_ + ": query at " + fmt(t) + " beyond extrapolation limit " +
                         fmt(last * kExtrapolationFactor));
    auto it = std::lower_bound(maturities_.begin(), maturities_.end(), t);
    if (it != maturities_.end() && *it == t)
        return log_discounts_[static_cast<std::size_t>(it - maturities_.begin())];
    if (it == maturities_.end()) {
        // flat instantaneous forward past the last pillar
        const std::size_t n = maturities_.size();
        const double t0 = (n >= 2) ? maturities_[n - 2] : 0.0;
        const double y0 = (n >= 2) ? log_discounts_[n - 2] : 0.0;
        const double slope = (log_discounts_[n - 1] - y0) / (maturities_[n - 1] - t0);
        return log_discounts_[n - 1] + slope * (t - last);
    }
    const std::size_t hi = static_cast<std::size_t>(it - maturities_.begin());
    const double t1 = (hi == 0) ? 0.0 : maturities_[hi - 1];
    const double y1 = (hi == 0) ? 0.0 : log_discounts_[hi - 1];
    const double w = (t - t1) / (maturities_[hi] - t1);
    return y1 + w * (log_discounts_[hi] - y1);
}

double DiscountInterp::discount(double t) const { return std::exp(log_discount(t)); }

NominalCurve NominalCurve::build(const std::vector<CurvePillar>& pillars, PillarKind kind,
                                 InterpRule rule) {
    if (pillars.empty()) throw CurveError("nominal curve: no pillars");
    std::vector<double> ts, lps;
    ts.reserve(pillars.size());
    lps.reserve(pillars.size());
    double prev_t = 0.0, prev_lp = 0.0;
    for (const auto& p : pillars) {
        if (!(p.maturity > prev_t)) {
            if (!ts.empty() && p.maturity == prev_t)
                throw CurveError("nominal curve: duplicate pillar maturity " + fmt(p.maturity));
            throw CurveError("nominal curve: pillar maturities must be strictly increasing and positive");
        }
        double lp;
        if (kind == PillarKind::DiscountFactor) {
            if (!(p.value > 0.0) || p.value > 1.0)
                throw CurveError("nominal curve: discount factor " + fmt(p.value) +
                                 " outside (0,1] at T=" + fmt(p.maturity));
            lp = std::log(p.value);
        } else {
            lp = -p.value * p.maturity;
        }
        if (!(lp < prev_lp))
            throw CurveError("nominal curve: discount factors must strictly decrease "
                             "(implied negative nominal rate at T=" + fmt(p.maturity) + ")");
        ts.push_back(p.maturity);
        lps.push_back(lp);
        prev_t = p.maturity;
        prev_lp = lp;
    }
    NominalCurve c;
    c.interp_ = DiscountInterp(std::move(ts), std::move(lps), "nominal curve");
    c.rule_ = rule;
    return c;
}

NominalCurve NominalCurve::flat(double zero_rate, double last_maturity) {
    return build({{last_maturity, zero_rate}}, PillarKind::ZeroRate);
}

double NominalCurve::forward_rate(double t1, double t2) const {
    if (!(t2 > t1)) throw CurveError("forward_rate requires t1 < t2");
    return (discount(t1) / discount(t2) - 1.0) / (t2 - t1);
}

RealCurve RealCurve::build(const std::vector<CurvePillar>& pillars, double base_date) {
    if (pillars.empty()) throw CurveError("real curve: no pillars");
    std::vector<double> ts, lps;
    for (const auto& p : pillars) {
        if (!(p.value > 0.0))
            throw CurveError("real curve: discount factor must be positive at T=" + fmt(p.maturity));
        ts.push_back(p.maturity);
        lps.push_back(std::log(p.value));
    }
    RealCurve c;
    c.interp_ = DiscountInterp(std::move(ts), std::move(lps), "real curve");
    c.base_date_ = base_date;
    return c;
}

InflationCurve InflationCurve::build(const NominalCurve& nominal, const RealCurve& real) {
    // Union of pillar dates keeps ln P_I piecewise linear on its own knots, so
    // the factorization P = P_R * P_I holds at every query point, not just at
    // pillars.
    const double last = std::min(nominal.interp().last_maturity(), real.interp().last_maturity());
    std::set<double> dates;
    for (double t : nominal.interp().maturities())
        if (t <= last) dates.insert(t);
    for (double t : real.interp().maturities())
        if (t <= last) dates.insert(t);
    std::vector<double> ts, lps;
    for (double t : dates) {
        ts.push_back(t);
        lps.push_back(nominal.log_discount(t) - real.log_discount(t));
    }
    InflationCurve c;
    c.interp_ = DiscountInterp(std::move(ts), std::move(lps), "inflation curve");
    return c;
}

void InflationCurve::set_fixings(std::vector<CpiFixing> fixings) {
    std::sort(fixings.begin(), fixings.end(),
              [](const CpiFixing& a, const CpiFixing& b) { return a.offset < b.offset; });
    for (std::size_t i = 0; i < fixings.size(); ++i) {
        if (!(fixings[i].level > 0.0)) throw CurveError("CPI fixing level must be positive");
        if (i > 0 && fixings[i].offset - fixings[i - 1].offset < 1e-9)
            throw CurveError("duplicate CPI fixing date");
    }
    fixings_ = std::move(fixings);
}

bool InflationCurve::has_fixing(double offset) const {
    for (const auto& f : fixings_)
        if (std::abs(f.offset - offset) < 1e-9) return true;
    return false;
}

double InflationCurve::fixing(double offset) const {
    for (const auto& f : fixings_)
        if (std::abs(f.offset - offset) < 1e-9) return f.level;
    throw CurveError("fixing required: no CPI fixing at offset " + fmt(offset) +
                     " (queries between fixing dates are not interpolated)");
}

RealCurve real_curve_from_zciis(const NominalCurve& nominal,
                                const std::vector<ZciisQuote>& quotes, double base_date) {
    if (quotes.empty()) throw CurveError("real_curve_from_zciis: no quotes");
    std::vector<CurvePillar> pillars;
    double prev_t = 0.0;
    for (const auto& q : quotes) {
        if (!(q.maturity > prev_t))
            throw CurveError("ZCIIS quote maturities must be strictly increasing and positive");
        if (!std::isfinite(q.rate) || q.rate <= -1.0)
            throw CurveError("ZCIIS rate at T=" + fmt(q.maturity) +
                             " must be finite and > -100%");
        if (q.maturity > nominal.interp().last_maturity())
            throw CurveError("ZCIIS maturity " + fmt(q.maturity) +
                             " beyond nominal curve support");
        pillars.push_back({q.maturity, nominal.discount(q.maturity) *
                                           std::pow(1.0 + q.rate, q.maturity)});
        prev_t = q.maturity;
    }
    return RealCurve::build(pillars, base_date);
}

double zciis_rate(const NominalCurve& nominal, const RealCurve& real, double maturity) {
    if (!(maturity > 0.0)) throw CurveError("zciis_rate requires positive maturity");
    return std::pow(real.discount(maturity) / nominal.discount(maturity), 1.0 / maturity) - 1.0;
}

double inflation_forward(const InflationCurve& infl, double t1, double t2) {
    if (!(t1 < t2)) throw CurveError("inflation_forward requires t1 < t2");
    const double dt = t2 - t1;
    if (t1 >= 0.0)
        return (infl.discount(t1) / infl.discount(t2) - 1.0) / dt;
    if (t2 <= 0.0)
        return (infl.fixing(t2) / infl.fixing(t1) - 1.0) / dt;
    // Seasoned period straddling the valuation date: realized index growth
    // I(0)/I(t1) so far, curve-implied 1/P_I(0,t2) for the remainder.
    const double realized = infl.fixing(0.0) / infl.fixing(t1);
    return (realized / infl.discount(t2) - 1.0) / dt;
}

double forward_real_bond_price(const RealCurve& real, double t1, double t2) {
    if (t1 < 0.0 || t1 > t2) throw CurveError("forward_real_bond_price requires 0 <= t1 <= t2");
    return real.discount(t2) / real.discount(t1);
}

}  // namespace ilmm
