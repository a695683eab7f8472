#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ilmm/curves.hpp"
#include "ilmm/errors.hpp"
#include "ilmm/joint_model.hpp"
#include "ilmm/normal.hpp"
#include "ilmm/pricing.hpp"
#include "ilmm/simulate.hpp"

using namespace ilmm;
using Catch::Approx;

namespace {

/// Market with prescribed inflation discounts P_I(0,T_j): the real curve is
/// backed out as P/P_I so the inflation forwards are exact.
struct Market {
    NominalCurve nominal;
    RealCurve real;
    InflationCurve inflation;
};

Market market_from_pi(const std::vector<double>& nominal_df, const std::vector<double>& pi) {
    Market m;
    std::vector<CurvePillar> np, rp;
    for (std::size_t i = 0; i < nominal_df.size(); ++i) {
        const double t = static_cast<double>(i + 1);
        np.push_back({t, nominal_df[i]});
        rp.push_back({t, nominal_df[i] / pi[i]});
    }
    m.nominal = NominalCurve::build(np);
    m.real = RealCurve::build(rp);
    m.inflation = InflationCurve::build(m.nominal, m.real);
    return m;
}

VolSurface flat_surface(const TenorGrid& grid, double nom_vol, double infl_vol, double rho) {
    std::vector<double> nv(grid.periods(), nom_vol);
    std::vector<double> iv(grid.periods(), infl_vol);
    return VolSurface::two_factor(grid, nv, iv, CorrelationSpec::two_factor(rho));
}

}  // namespace

TEST_CASE("ZCIIS pricing") {
    const auto nominal = NominalCurve::build({{5.0, 0.85}, {10.0, 0.70}});
    SECTION("fair quote prices to zero") {
        const auto real = real_curve_from_zciis(nominal, {{10.0, 0.023530}});
        CHECK(price_zciis(nominal, real, 0.023530, 10.0, 1.0) == Approx(0.0).margin(1e-15));
    }
    SECTION("10y off-market strike, hand-computed powers") {
        const auto real = real_curve_from_zciis(nominal, {{10.0, 0.023530}});
        CHECK(price_zciis(nominal, real, 0.02, 10.0, 1.0) ==
              Approx(0.029994905275328746).epsilon(1e-12));
        CHECK(price_zciis(nominal, real, 0.02, 10.0, 2.0) ==
              Approx(2 * 0.029994905275328746).epsilon(1e-12));
    }
    SECTION("zero strike pays the full discount gap") {
        const auto real = real_curve_from_zciis(nominal, {{10.0, 0.023530}});
        CHECK(price_zciis(nominal, real, 0.0, 10.0, 1.0) ==
              Approx(real.discount(10.0) - 0.70).epsilon(1e-14));
    }
}

TEST_CASE("YYIIS pricing is the discounted sum of forward differences") {
    const Market m = market_from_pi({0.96, 0.92}, {1.0 / 1.02, 1.0 / (1.02 * 1.03)});
    const TenorGrid grid = TenorGrid::annual(2);
    SECTION("hand sum at zero strike") {
        CHECK(price_yyiis(m.nominal, m.inflation, grid, 0.0, 1.0) ==
              Approx(0.96 * 0.02 + 0.92 * 0.03).epsilon(1e-12));
    }
    SECTION("strike at the swap rate prices to zero") {
        const auto view = swap_rate_view(m.nominal, m.inflation, grid, 0, 2);
        CHECK(price_yyiis(m.nominal, m.inflation, grid, view.swap_rate, 1.0) ==
              Approx(0.0).margin(1e-15));
    }
    SECTION("flat forwards at the strike price to zero") {
        const Market flat = market_from_pi({0.96, 0.92}, {1.0 / 1.02, 1.0 / (1.02 * 1.02)});
        CHECK(price_yyiis(flat.nominal, flat.inflation, grid, 0.02, 1.0) ==
              Approx(0.0).margin(1e-14));
    }
}

TEST_CASE("caplet pricing limits") {
    const TenorGrid grid = TenorGrid::annual(1);
    SECTION("zero vol returns the discounted intrinsic") {
        const Market m = market_from_pi({0.95}, {1.0 / 1.03});
        const VolSurface vols = flat_surface(grid, 0.15, 0.0, 0.0);
        CHECK(price_caplet(m.nominal, m.inflation, vols, 1, 0.02, 1.0) ==
              Approx(0.95 * 0.01).epsilon(1e-12));
    }
    SECTION("at-the-money displaced value") {
        // mu = K~ and sigma sqrt(T) = 0.01: price = dT P mu (2 Phi(0.005) - 1)
        const Market m = market_from_pi({0.95}, {1.0 / 1.03});
        const VolSurface vols = flat_surface(grid, 0.15, 0.01, 0.0);
        const double mu = 1.03;
        CHECK(price_caplet(m.nominal, m.inflation, vols, 1, 0.03, 1.0) ==
              Approx(0.95 * mu * 0.0039894061814816446).epsilon(1e-12));
    }
    SECTION("displaced strike must stay positive") {
        const Market m = market_from_pi({0.95}, {1.0 / 1.03});
        const VolSurface vols = flat_surface(grid, 0.15, 0.01, 0.0);
        CHECK_THROWS_AS(price_caplet(m.nominal, m.inflation, vols, 1, -1.2, 1.0), ModelError);
    }
}

TEST_CASE("seasoned caplet uses the fixing-adjusted forward and clipped variance") {
    // period [-0.5, 0.5] already half-elapsed; CPI grew 1% since the period
    // started
    const TenorGrid grid({-0.5, 0.5, 1.5}, true);
    const auto nominal = NominalCurve::build({{0.5, 0.98}, {1.5, 0.94}});
    const auto real = RealCurve::build({{0.5, 0.99}, {1.5, 0.965}});
    auto inflation = InflationCurve::build(nominal, real);
    inflation.set_fixings({{-0.5, 100.0}, {0.0, 101.0}});

    std::vector<double> nv(2, 0.15), iv(2, 0.008);
    const VolSurface vols =
        VolSurface::two_factor(grid, nv, iv, CorrelationSpec::two_factor(0.0));

    const double strike = 0.02;
    // forward: [(I(0)/I(-0.5)) / P_I(0, 0.5) - 1] / dT with dT = 1
    const double pi_half = nominal.discount(0.5) / real.discount(0.5);
    const double mu = (101.0 / 100.0) / pi_half;
    const double k_tilde = strike + 1.0;
    // variance accrues over [0, T_1] only: half the calendar interval
    const double stdev = std::sqrt(0.008 * 0.008 * 0.5);
    const double expected = 0.98 * black_call(mu, k_tilde, stdev);
    CHECK(price_caplet(nominal, inflation, vols, 1, strike, 1.0) ==
          Approx(expected).epsilon(1e-13));

    // without the CPI fixings the seasoned forward cannot be formed
    auto bare = InflationCurve::build(nominal, real);
    CHECK_THROWS_WITH(price_caplet(nominal, bare, vols, 1, strike, 1.0),
                      Catch::Matchers::ContainsSubstring("fixing required"));
}

TEST_CASE("seasoned YYIIS skips paid periods and splices the straddling one") {
    const TenorGrid grid({-1.0, 0.5, 1.5}, true);
    const auto nominal = NominalCurve::build({{0.5, 0.98}, {1.5, 0.94}});
    const auto real = RealCurve::build({{0.5, 0.99}, {1.5, 0.965}});
    auto inflation = InflationCurve::build(nominal, real);
    inflation.set_fixings({{-1.0, 100.0}, {0.0, 101.5}});

    const double f1 = inflation_forward(inflation, -1.0, 0.5);
    const double f2 = inflation_forward(inflation, 0.5, 1.5);
    const double expected = 1.5 * 0.98 * (f1 - 0.02) + 1.0 * 0.94 * (f2 - 0.02);
    CHECK(price_yyiis(nominal, inflation, grid, 0.02, 1.0) ==
          Approx(expected).epsilon(1e-13));
}

TEST_CASE("caplet matches its Monte Carlo oracle") {
    const Market m = market_from_pi({0.96, 0.92, 0.885, 0.85},
                                    {0.977, 0.955, 0.932, 0.91});
    const TenorGrid grid = TenorGrid::annual(4);
    const VolSurface vols = flat_surface(grid, 0.15, 0.006, -0.0535);
    const JointModel model = JointModel::from_curves(m.nominal, m.inflation, vols);
    const std::size_t j = 3;
    const double strike = 0.022;
    const double kt = strike + 1.0;

    McConfig cfg;
    cfg.measure = Measure::Forward;
    cfg.forward_index = j;
    cfg.horizon_index = j;
    cfg.paths = 80000;
    cfg.seed = 51;
    Payoff payoff{"caplet",
                  [j, kt](const PathState& st) { return std::max(st.mu(j) - kt, 0.0); }, true};
    const auto est = mc_value(model, cfg, {payoff});
    const double cf = price_caplet(m.nominal, m.inflation, vols, j, strike, 1.0);
    CHECK(std::fabs(est[0].value - cf) < 3.0 * est[0].std_error);
}

TEST_CASE("caplet/floorlet parity and monotonicity") {
    std::mt19937_64 gen(1234);
    std::uniform_real_distribution<double> udf(0.7, 0.99), upi(0.9, 1.0), uv(0.0, 0.02),
        uk(-0.01, 0.05);
    const TenorGrid grid = TenorGrid::annual(2);
    for (int it = 0; it < 200; ++it) {
        const double df1 = udf(gen);
        const Market m = market_from_pi({df1, df1 * udf(gen)}, {upi(gen), upi(gen) * upi(gen)});
        const VolSurface vols = flat_surface(grid, 0.15, uv(gen), -0.0535);
        const double k = uk(gen);
        const double cap = price_caplet(m.nominal, m.inflation, vols, 2, k, 1.0);
        const double floor = price_floorlet(m.nominal, m.inflation, vols, 2, k, 1.0);
        const double f = inflation_forward(m.inflation, 1.0, 2.0);
        const double parity = m.nominal.discount(2.0) * (f - k);
        CHECK(cap - floor == Approx(parity).margin(1e-12));

        // price inside [intrinsic, discounted displaced-forward bound]
        const double intrinsic = m.nominal.discount(2.0) * std::max(f - k, 0.0);
        const double bound = m.nominal.discount(2.0) * (f + 1.0);
        CHECK(cap >= intrinsic - 1e-15);
        CHECK(cap <= bound + 1e-15);
    }

    SECTION("decreasing in strike, increasing in vol") {
        const Market m = market_from_pi({0.96, 0.92}, {0.977, 0.955});
        double prev = 1e9;
        for (double k : {0.0, 0.01, 0.02, 0.03}) {
            const double v = price_caplet(m.nominal, m.inflation,
                                          flat_surface(grid, 0.15, 0.005, 0.0), 2, k, 1.0);
            CHECK(v < prev);
            prev = v;
        }
        prev = 0.0;
        for (double s : {0.001, 0.005, 0.01, 0.02}) {
            const double v = price_caplet(m.nominal, m.inflation,
                                          flat_surface(grid, 0.15, s, 0.0), 2, 0.025, 1.0);
            CHECK(v > prev);
            prev = v;
        }
    }

    SECTION("increasing in expiry at a fixed forward and discount") {
        // same forward (2.3%), same discount, flat vol: only sigma sqrt(T)
        // grows with the caplet index
        const std::vector<double> dfs = {0.95, 0.95 * 0.95, 0.95 * 0.95 * 0.95};
        const std::vector<double> pis = {1 / 1.023, 1 / (1.023 * 1.023),
                                         1 / (1.023 * 1.023 * 1.023)};
        const Market m3 = market_from_pi(dfs, pis);
        const TenorGrid g3 = TenorGrid::annual(3);
        const VolSurface vols = flat_surface(g3, 0.15, 0.006, 0.0);
        double prev_t = 0.0;
        for (std::size_t j = 1; j <= 3; ++j) {
            const double v = price_caplet(m3.nominal, m3.inflation, vols, j, 0.025, 1.0) /
                             m3.nominal.discount(g3.date(j));
            CHECK(v > prev_t);
            prev_t = v;
        }
    }
}

TEST_CASE("cap is the sum of caplets and satisfies cap-floor parity") {
    const Market m = market_from_pi({0.96, 0.92, 0.885}, {0.977, 0.955, 0.931});
    const TenorGrid grid = TenorGrid::annual(3);
    const VolSurface vols = flat_surface(grid, 0.15, 0.007, -0.0535);

    CHECK(price_cap(m.nominal, m.inflation, vols, 1, 0.02, 1.0) ==
          Approx(price_caplet(m.nominal, m.inflation, vols, 1, 0.02, 1.0)).epsilon(1e-15));

    double caplet_sum = 0.0;
    for (std::size_t j = 1; j <= 3; ++j)
        caplet_sum += price_caplet(m.nominal, m.inflation, vols, j, 0.02, 1.0);
    CHECK(price_cap(m.nominal, m.inflation, vols, 3, 0.02, 1.0) ==
          Approx(caplet_sum).epsilon(1e-15));

    const double cap = price_cap(m.nominal, m.inflation, vols, 3, 0.02, 1.0);
    const double floor = price_floor(m.nominal, m.inflation, vols, 3, 0.02, 1.0);
    const double yyiis = price_yyiis(m.nominal, m.inflation, grid, 0.02, 1.0);
    CHECK(cap - floor == Approx(yyiis).margin(1e-13));
}

TEST_CASE("swap rate view invariants and oracle") {
    const Market m = market_from_pi({0.96, 0.92, 0.885, 0.84}, {0.977, 0.955, 0.931, 0.905});
    const TenorGrid grid = TenorGrid::annual(4);

    SECTION("single-period span reduces to the forward") {
        const auto v = swap_rate_view(m.nominal, m.inflation, grid, 2, 3);
        CHECK(v.swap_rate == Approx(inflation_forward(m.inflation, 2.0, 3.0)).epsilon(1e-14));
        CHECK(v.inv_accrual == Approx(1.0).epsilon(1e-14));
        CHECK(v.omega.size() == 1);
        CHECK(v.omega[0] == Approx(1.0).epsilon(1e-15));
    }
    SECTION("flat forwards give the flat swap rate") {
        const Market flat =
            market_from_pi({0.96, 0.92, 0.885, 0.84},
                           {1 / 1.02, 1 / (1.02 * 1.02), 1 / std::pow(1.02, 3),
                            1 / std::pow(1.02, 4)});
        const auto v = swap_rate_view(flat.nominal, flat.inflation, grid, 0, 4);
        CHECK(v.swap_rate == Approx(0.02).epsilon(1e-12));
    }
    SECTION("three-period direct-summation oracle and identities") {
        const auto v = swap_rate_view(m.nominal, m.inflation, grid, 1, 4);
        double annuity = 0.0, num = 0.0;
        for (std::size_t i = 2; i <= 4; ++i) {
            const double w = m.nominal.discount(grid.date(i));
            annuity += w;
            num += w * inflation_forward(m.inflation, grid.date(i - 1), grid.date(i));
        }
        CHECK(v.annuity == Approx(annuity).epsilon(1e-14));
        CHECK(v.swap_rate == Approx(num / annuity).epsilon(1e-13));

        double sum_omega = 0.0, sum_alpha = 0.0, s_disp = 0.0, inv = 0.0;
        for (std::size_t i = 0; i < v.omega.size(); ++i) {
            sum_omega += v.omega[i];
            sum_alpha += v.alpha[i];
            s_disp += v.omega[i] * v.mu[i];
            inv += v.omega[i];  // dT = 1
        }
        CHECK(sum_omega == Approx(1.0).margin(1e-14));
        CHECK(sum_alpha == Approx(1.0).margin(1e-14));
        CHECK(v.swap_rate + v.inv_accrual == Approx(s_disp).margin(1e-14));
        CHECK(v.inv_accrual == Approx(inv).margin(1e-14));
    }
    SECTION("degenerate span is rejected") {
        CHECK_THROWS_AS(swap_rate_view(m.nominal, m.inflation, grid, 3, 3), ModelError);
        CHECK_THROWS_AS(swap_rate_view(m.nominal, m.inflation, grid, 2, 9), ModelError);
    }
}

TEST_CASE("swaption pricing") {
    const Market m = market_from_pi({0.96, 0.92, 0.885, 0.84, 0.80},
                                    {0.977, 0.955, 0.931, 0.905, 0.882});
    const TenorGrid grid = TenorGrid::annual(5);

    SECTION("zero vol returns the intrinsic annuity value") {
        const VolSurface vols = flat_surface(grid, 0.0, 0.0, 0.0);
        const auto v = swap_rate_view(m.nominal, m.inflation, grid, 2, 5);
        const double k = v.swap_rate - 0.005;
        CHECK(price_swaption(m.nominal, m.inflation, vols, 2, 5, k, 1.0) ==
              Approx(v.annuity * (v.swap_rate - k)).epsilon(1e-12));
        CHECK(price_swaption(m.nominal, m.inflation, vols, 2, 5, v.swap_rate + 0.005, 1.0) ==
              0.0);
    }
    SECTION("at-the-money symmetry") {
        const VolSurface vols = flat_surface(grid, 0.15, 0.006, -0.0535);
        const auto v = swap_rate_view(m.nominal, m.inflation, grid, 2, 5);
        const double sigma = swaption_vol(m.nominal, vols, v);
        const double stdev = sigma * std::sqrt(grid.date(2));
        const double expected =
            v.annuity * (v.swap_rate + v.inv_accrual) *
            (norm_cdf(stdev / 2) - norm_cdf(-stdev / 2));
        CHECK(price_swaption(m.nominal, m.inflation, vols, 2, 5, v.swap_rate, 1.0) ==
              Approx(expected).epsilon(1e-12));
    }
    SECTION("single-period swaption equals the caplet when the last-interval vol vanishes") {
        // gamma^I_3 zero on (T_2, T_3]: the caplet underlying stops moving at
        // the swaption expiry
        std::vector<double> nv(5, 0.15);
        std::vector<std::vector<double>> iv(5);
        for (std::size_t j = 1; j <= 5; ++j) iv[j - 1].assign(grid.size(), 0.006);
        iv[2][3] = 0.0;  // forward 3, interval 3
        const VolSurface vols = VolSurface::two_factor_piecewise(
            grid, nv, iv, CorrelationSpec::two_factor(-0.0535));
        const double swo = price_swaption(m.nominal, m.inflation, vols, 2, 3, 0.02, 1.0);
        const double cpl = price_caplet(m.nominal, m.inflation, vols, 3, 0.02, 1.0);
        CHECK(swo == Approx(cpl).epsilon(1e-13));
    }
    SECTION("price increases with the vol scale") {
        double prev = 0.0;
        for (double s : {0.002, 0.005, 0.01}) {
            const VolSurface vols = flat_surface(grid, 0.15, s, -0.0535);
            const double v = price_swaption(m.nominal, m.inflation, vols, 2, 5, 0.025, 1.0);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("implied caplet vol inverts the pricing formula") {
    const Market m = market_from_pi({0.96, 0.92}, {0.977, 0.955});
    const TenorGrid grid = TenorGrid::annual(2);

    SECTION("round trip at 0.005") {
        const VolSurface vols = flat_surface(grid, 0.15, 0.005, 0.0);
        const double price = price_caplet(m.nominal, m.inflation, vols, 2, 0.02, 1.0);
        CHECK(implied_caplet_vol(m.nominal, m.inflation, grid, 2, 0.02, price) ==
              Approx(0.005).margin(1e-8));
    }
    SECTION("intrinsic price gives zero vol") {
        const double f = inflation_forward(m.inflation, 1.0, 2.0);
        const double intrinsic = m.nominal.discount(2.0) * std::max(f - 0.01, 0.0);
        CHECK(implied_caplet_vol(m.nominal, m.inflation, grid, 2, 0.01, intrinsic) == 0.0);
    }
    SECTION("prices outside the band are rejected") {
        const double f = inflation_forward(m.inflation, 1.0, 2.0);
        const double upper = m.nominal.discount(2.0) * (f + 1.0);
        CHECK_THROWS_AS(implied_caplet_vol(m.nominal, m.inflation, grid, 2, 0.02, upper * 1.01),
                        ArbitrageError);
        const double below = m.nominal.discount(2.0) * (f - 0.01) * 0.5;
        CHECK_THROWS_AS(implied_caplet_vol(m.nominal, m.inflation, grid, 2, 0.01, below),
                        ArbitrageError);
    }
}

TEST_CASE("instrument dispatch prices a book row and captures errors") {
    const Market m = market_from_pi({0.96, 0.92, 0.885}, {0.977, 0.955, 0.931});
    const TenorGrid grid = TenorGrid::annual(3);
    const VolSurface vols = flat_surface(grid, 0.15, 0.006, 0.0);

    Instrument caplet;
    caplet.id = "c1";
    caplet.kind = Instrument::Kind::Caplet;
    caplet.start = 1.0;
    caplet.end = 2.0;
    caplet.strike = 0.02;
    caplet.notional = 100.0;
    const auto rec = price_instrument(m.nominal, m.real, m.inflation, vols, caplet);
    CHECK(rec.ok);
    CHECK(rec.value ==
          Approx(price_caplet(m.nominal, m.inflation, vols, 2, 0.02, 100.0)).epsilon(1e-15));

    Instrument off_grid = caplet;
    off_grid.end = 2.5;
    const auto bad = price_instrument(m.nominal, m.real, m.inflation, vols, off_grid);
    CHECK_FALSE(bad.ok);
    CHECK(!bad.error.empty());

    // YYIIS records ignore the vol surface entirely
    Instrument yy;
    yy.id = "y1";
    yy.kind = Instrument::Kind::Yyiis;
    yy.start = 0.0;
    yy.end = 3.0;
    yy.strike = 0.02;
    yy.notional = 1.0;
    const auto r1 = price_instrument(m.nominal, m.real, m.inflation, vols, yy);
    const auto r2 = price_instrument(m.nominal, m.real, m.inflation,
                                     flat_surface(grid, 0.3, 0.02, 0.4), yy);
    CHECK(r1.value == r2.value);
}
