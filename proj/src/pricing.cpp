#include "ilmm/pricing.hpp"

#include <algorithm>
#include <cmath>

#include "ilmm/errors.hpp"
#include "ilmm/joint_model.hpp"
#include "ilmm/normal.hpp"

namespace ilmm {

double black_call(double forward, double strike, double stdev) {
    if (!(forward > 0.0) || !(strike > 0.0))
        throw ModelError("black_call: displaced forward and strike must be positive");
    if (stdev < 0.0) throw ModelError("black_call: negative stdev");
    if (stdev == 0.0) return std::max(forward - strike, 0.0);
    const double d1 = (std::log(forward / strike) + 0.5 * stdev * stdev) / stdev;
    const double d2 = d1 - stdev;
    return forward * norm_cdf(d1) - strike * norm_cdf(d2);
}

double black_put(double forward, double strike, double stdev) {
    if (!(forward > 0.0) || !(strike > 0.0))
        throw ModelError("black_put: displaced forward and strike must be positive");
    if (stdev < 0.0) throw ModelError("black_put: negative stdev");
    if (stdev == 0.0) return std::max(strike - forward, 0.0);
    const double d1 = (std::log(forward / strike) + 0.5 * stdev * stdev) / stdev;
    const double d2 = d1 - stdev;
    return strike * norm_cdf(-d2) - forward * norm_cdf(-d1);
}

double price_zciis(const NominalCurve& nominal, const RealCurve& real, double strike,
                   double maturity, double notional) {
    return notional * (real.discount(maturity) -
                       nominal.discount(maturity) * std::pow(1.0 + strike, maturity));
}

double price_yyiis(const NominalCurve& nominal, const InflationCurve& inflation,
                   const TenorGrid& schedule, double strike, double notional) {
    double v = 0.0;
    for (std::size_t j = 1; j <= schedule.periods(); ++j) {
        if (schedule.date(j) <= 0.0) continue;  // already paid
        const double f = inflation_forward(inflation, schedule.date(j - 1), schedule.date(j));
        v += schedule.accrual(j) * nominal.discount(schedule.date(j)) * (f - strike);
    }
    return notional * v;
}

namespace {

struct CapletSetup {
    double expiry;     // T_j
    double accrual;    // dT_j
    double discount;   // P(0, T_j)
    double mu;         // displaced forward
    double k_tilde;    // displaced strike
    double stdev;      // sigma_j sqrt(T_j)
};

CapletSetup caplet_setup(const NominalCurve& nominal, const InflationCurve& inflation,
                         const VolSurface& vols, std::size_t j, double strike) {
    const TenorGrid& grid = vols.grid();
    if (j < 1 || j > grid.periods()) throw ModelError("caplet index out of grid");
    CapletSetup s;
    s.expiry = grid.date(j);
    if (!(s.expiry > 0.0)) throw ModelError("caplet already expired (T_j <= 0)");
    s.accrual = grid.accrual(j);
    s.discount = nominal.discount(s.expiry);
    s.mu = inflation_forward(inflation, grid.date(j - 1), s.expiry) + 1.0 / s.accrual;
    s.k_tilde = strike + 1.0 / s.accrual;
    if (!(s.k_tilde > 0.0))
        throw ModelError("displaced strike K + 1/dT must be positive (payoff would be "
                         "one-sided almost surely)");
    s.stdev = std::sqrt(vols.inflation_variance(j));
    return s;
}

}  // namespace

double price_caplet(const NominalCurve& nominal, const InflationCurve& inflation,
                    const VolSurface& vols, std::size_t j, double strike, double notional) {
    const CapletSetup s = caplet_setup(nominal, inflation, vols, j, strike);
    return notional * s.accrual * s.discount * black_call(s.mu, s.k_tilde, s.stdev);
}

double price_floorlet(const NominalCurve& nominal, const InflationCurve& inflation,
                      const VolSurface& vols, std::size_t j, double strike, double notional) {
    const CapletSetup s = caplet_setup(nominal, inflation, vols, j, strike);
    return notional * s.accrual * s.discount * black_put(s.mu, s.k_tilde, s.stdev);
}

double price_cap(const NominalCurve& nominal, const InflationCurve& inflation,
                 const VolSurface& vols, std::size_t n_periods, double strike, double notional) {
    if (n_periods < 1 || n_periods > vols.grid().periods())
        throw ModelError("cap length out of grid");
    double v = 0.0;
    for (std::size_t j = 1; j <= n_periods; ++j)
        v += price_caplet(nominal, inflation, vols, j, strike, notional);
    return v;
}

double price_floor(const NominalCurve& nominal, const InflationCurve& inflation,
                   const VolSurface& vols, std::size_t n_periods, double strike,
                   double notional) {
    if (n_periods < 1 || n_periods > vols.grid().periods())
        throw ModelError("floor length out of grid");
    double v = 0.0;
    for (std::size_t j = 1; j <= n_periods; ++j)
        v += price_floorlet(nominal, inflation, vols, j, strike, notional);
    return v;
}

SwapRateView swap_rate_view(const NominalCurve& nominal, const InflationCurve& inflation,
                            const TenorGrid& grid, std::size_t m, std::size_t n) {
    if (!(m < n) || n > grid.periods()) throw ModelError("swap span requires m < n <= N");
    SwapRateView v;
    v.m = m;
    v.n = n;
    const std::size_t len = n - m;
    v.omega.resize(len);
    v.alpha.resize(len);
    v.mu.resize(len);
    double annuity = 0.0;
    for (std::size_t i = m + 1; i <= n; ++i) {
        const double w = grid.accrual(i) * nominal.discount(grid.date(i));
        v.omega[i - m - 1] = w;
        annuity += w;
    }
    v.annuity = annuity;
    double s_displaced = 0.0;
    for (std::size_t i = m + 1; i <= n; ++i) {
        v.omega[i - m - 1] /= annuity;
        v.mu[i - m - 1] = inflation_forward(inflation, grid.date(i - 1), grid.date(i)) +
                          1.0 / grid.accrual(i);
        s_displaced += v.omega[i - m - 1] * v.mu[i - m - 1];
        v.inv_accrual += v.omega[i - m - 1] / grid.accrual(i);
    }
    for (std::size_t i = 0; i < len; ++i)
        v.alpha[i] = v.omega[i] * v.mu[i] / s_displaced;
    v.swap_rate = s_displaced - v.inv_accrual;
    return v;
}

double swaption_vol(const NominalCurve& nominal, const VolSurface& vols,
                    const SwapRateView& view) {
    const TenorGrid& grid = vols.grid();
    const std::size_t m = view.m, n = view.n;
    const double t_m = grid.date(m);
    if (!(t_m > 0.0)) throw ModelError("swaption expiry T_m must be positive");
    if (grid.front() != 0.0) throw ModelError("swaption vol requires a grid anchored at 0");
    const int d = vols.factors();

    const auto f0 = initial_nominal_forwards(nominal, grid);
    const auto w0 = drift_weights(grid, f0);

    std::vector<double> sig(static_cast<std::size_t>(d));
    std::vector<double> g(static_cast<std::size_t>(d));
    double variance = 0.0;
    // loadings are piecewise constant per calendar interval; weights stay
    // frozen at time 0 while the loadings keep their own time dependence
    for (std::size_t i = 1; i <= m; ++i) {
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t l = m + 1; l <= n; ++l) {
            const double* gi = vols.inflation_loading(l, i);
            bond_vol(vols, w0, i, l, sig.data());
            const double a = view.alpha[l - m - 1];
            const double aw = a - view.omega[l - m - 1];
            for (int c = 0; c < d; ++c) g[static_cast<std::size_t>(c)] += a * gi[c] + aw * sig[static_cast<std::size_t>(c)];
        }
        double n2 = 0.0;
        for (int c = 0; c < d; ++c) n2 += g[static_cast<std::size_t>(c)] * g[static_cast<std::size_t>(c)];
        variance += n2 * grid.accrual(i);
    }
    return std::sqrt(variance / t_m);
}

double price_swaption(const NominalCurve& nominal, const InflationCurve& inflation,
                      const VolSurface& vols, std::size_t m, std::size_t n, double strike,
                      double notional) {
    const SwapRateView view = swap_rate_view(nominal, inflation, vols.grid(), m, n);
    const double k_tilde = strike + view.inv_accrual;
    if (!(k_tilde > 0.0)) throw ModelError("displaced swaption strike must be positive");
    const double sigma = swaption_vol(nominal, vols, view);
    const double stdev = sigma * std::sqrt(vols.grid().date(m));
    return notional * view.annuity *
           black_call(view.swap_rate + view.inv_accrual, k_tilde, stdev);
}

double implied_caplet_vol(const NominalCurve& nominal, const InflationCurve& inflation,
                          const TenorGrid& grid, std::size_t j, double strike, double price,
                          double notional) {
    if (j < 1 || j > grid.periods()) throw ModelError("caplet index out of grid");
    const double expiry = grid.date(j);
    if (!(expiry > 0.0)) throw ModelError("caplet already expired");
    const double accrual = grid.accrual(j);
    const double df = nominal.discount(expiry);
    const double mu =
        inflation_forward(inflation, grid.date(j - 1), expiry) + 1.0 / accrual;
    const double k_tilde = strike + 1.0 / accrual;
    if (!(k_tilde > 0.0)) throw ModelError("displaced strike must be positive");

    const double scale = notional * accrual * df;
    const double intrinsic = scale * std::max(mu - k_tilde, 0.0);
    const double upper = scale * mu;
    const double tol = 1e-10 * std::max(notional, 1.0);
    if (price < intrinsic - tol)
        throw ArbitrageError("caplet price " + std::to_string(price) +
                             " below intrinsic value " + std::to_string(intrinsic));
    if (price > upper + tol)
        throw ArbitrageError("caplet price " + std::to_string(price) +
                             " above the discounted displaced-forward bound " +
                             std::to_string(upper));
    if (price <= intrinsic + tol) return 0.0;

    auto value = [&](double sigma) {
        return scale * black_call(mu, k_tilde, sigma * std::sqrt(expiry)) - price;
    };
    // bracket then bisect/secant; the price is strictly increasing in sigma
    double lo = 0.0, hi = 0.1;
    while (value(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 64.0)
            throw ArbitrageError("caplet price cannot be matched by any finite volatility");
    }
    double flo = value(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = value(mid);
        if (std::abs(fm) < tol) return mid;
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Instrument::Kind Instrument::parse_kind(const std::string& s) {
    if (s == "zciis") return Kind::Zciis;
    if (s == "yyiis") return Kind::Yyiis;
    if (s == "caplet") return Kind::Caplet;
    if (s == "floorlet") return Kind::Floorlet;
    if (s == "cap") return Kind::Cap;
    if (s == "floor") return Kind::Floor;
    if (s == "swaption") return Kind::Swaption;
    throw InputError("unknown instrument kind '" + s + "'");
}

std::string Instrument::kind_name(Kind k) {
    switch (k) {
        case Kind::Zciis: return "zciis";
        case Kind::Yyiis: return "yyiis";
        case Kind::Caplet: return "caplet";
        case Kind::Floorlet: return "floorlet";
        case Kind::Cap: return "cap";
        case Kind::Floor: return "floor";
        case Kind::Swaption: return "swaption";
    }
    return "?";
}

namespace {

std::size_t grid_index_for(const TenorGrid& grid, double t, const char* what) {
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid.date(i) - t) < 1e-9) return i;
    throw ModelError(std::string(what) + " date " + std::to_string(t) +
                     " does not lie on the market grid");
}

}  // namespace

PriceRecord price_instrument(const NominalCurve& nominal, const RealCurve& real,
                             const InflationCurve& inflation, const VolSurface& vols,
                             const Instrument& instr) {
    PriceRecord rec;
    rec.id = instr.id;
    rec.kind = Instrument::kind_name(instr.kind);
    try {
        const TenorGrid& grid = vols.grid();
        switch (instr.kind) {
            case Instrument::Kind::Zciis:
                rec.value = price_zciis(nominal, real, instr.strike, instr.end, instr.notional);
                break;
            case Instrument::Kind::Yyiis: {
                if (!(instr.freq > 0.0) || !(instr.end > instr.start))
                    throw ModelError("YYIIS schedule requires start < end and freq > 0");
                const int np = static_cast<int>(std::lround((instr.end - instr.start) / instr.freq));
                std::vector<double> dates(static_cast<std::size_t>(np) + 1);
                for (int q = 0; q <= np; ++q)
                    dates[static_cast<std::size_t>(q)] = instr.start + q * instr.freq;
                rec.value = price_yyiis(nominal, inflation, TenorGrid(std::move(dates), true),
                                        instr.strike, instr.notional);
                break;
            }
            case Instrument::Kind::Caplet:
            case Instrument::Kind::Floorlet: {
                const std::size_t j = grid_index_for(grid, instr.end, "caplet expiry");
                rec.vol_used = vols.implied_caplet_vol(j);
                rec.value = instr.kind == Instrument::Kind::Caplet
                                ? price_caplet(nominal, inflation, vols, j, instr.strike,
                                               instr.notional)
                                : price_floorlet(nominal, inflation, vols, j, instr.strike,
                                                 instr.notional);
                break;
            }
            case Instrument::Kind::Cap:
            case Instrument::Kind::Floor: {
                const std::size_t n = grid_index_for(grid, instr.end, "cap maturity");
                rec.value = instr.kind == Instrument::Kind::Cap
                                ? price_cap(nominal, inflation, vols, n, instr.strike,
                                            instr.notional)
                                : price_floor(nominal, inflation, vols, n, instr.strike,
                                              instr.notional);
                break;
            }
            case Instrument::Kind::Swaption: {
                const std::size_t m = grid_index_for(grid, instr.start, "swaption expiry");
                const std::size_t n = grid_index_for(grid, instr.end, "swap end");
                const SwapRateView view = swap_rate_view(nominal, inflation, grid, m, n);
                rec.vol_used = swaption_vol(nominal, vols, view);
                rec.value = price_swaption(nominal, inflation, vols, m, n, instr.strike,
                                           instr.notional);
                break;
            }
        }
        rec.per_notional = instr.notional != 0.0 ? rec.value / instr.notional : 0.0;
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
    }
    return rec;
}

}  // namespace ilmm
