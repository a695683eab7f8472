#include <catch2/catch_amalgamated.hpp>

#include <omp.h>

#include <cmath>
#include <random>

#include "ilmm/curves.hpp"
#include "ilmm/errors.hpp"
#include "ilmm/joint_model.hpp"
#include "ilmm/simulate.hpp"
#include "ilmm/vol_surface.hpp"

using namespace ilmm;
using Catch::Approx;

namespace {

struct TestMarket {
    NominalCurve nominal;
    RealCurve real;
    InflationCurve inflation;
};

TestMarket make_market(double horizon) {
    TestMarket m;
    m.nominal = NominalCurve::flat(0.04, horizon);
    std::vector<ZciisQuote> quotes;
    for (double t = 1.0; t <= horizon; t += 1.0)
        quotes.push_back({t, 0.0235 + 0.0005 * std::sin(t)});
    m.real = real_curve_from_zciis(m.nominal, quotes);
    m.inflation = InflationCurve::build(m.nominal, m.real);
    return m;
}

VolSurface make_surface(const TenorGrid& grid, double rho, double infl_vol = 0.005) {
    std::vector<double> nv(grid.periods(), 0.15);
    std::vector<double> iv(grid.periods(), infl_vol);
    return VolSurface::two_factor(grid, nv, iv, CorrelationSpec::two_factor(rho));
}

}  // namespace

TEST_CASE("vol surface stores loadings and enforces the fixing rule") {
    const TenorGrid grid = TenorGrid::annual(3);
    VolSurface s(grid, 2);
    const double v[2] = {0.1, 0.05};
    s.set_inflation_loading(2, 1, v);
    CHECK(s.inflation_loading(2, 1)[0] == 0.1);
    CHECK(s.inflation_loading(2, 3)[0] == 0.0);  // zero after own fixing
    CHECK_THROWS_AS(s.set_inflation_loading(2, 3, v), ModelError);
    CHECK_THROWS_AS(s.set_nominal_loading(1, 2, v), ModelError);
    const double big[2] = {6.0, 0.0};
    CHECK_THROWS_AS(s.set_nominal_loading(2, 1, big), ModelError);
}

TEST_CASE("two-factor embedding carries the correlation in the cross product") {
    const TenorGrid grid = TenorGrid::annual(3);
    const double rho = -0.0535;
    const VolSurface s = make_surface(grid, rho, 0.004);
    const double* gn = s.nominal_loading(2, 1);
    const double* gi = s.inflation_loading(2, 1);
    const double dot = gn[0] * gi[0] + gn[1] * gi[1];
    const double nn = std::hypot(gn[0], gn[1]);
    const double ni = std::hypot(gi[0], gi[1]);
    CHECK(ni == Approx(0.004).epsilon(1e-14));
    CHECK(dot / (nn * ni) == Approx(rho).epsilon(1e-12));
}

TEST_CASE("caplet variance integral sums piecewise pieces") {
    const TenorGrid grid = TenorGrid::annual(3);
    VolSurface s(grid, 1);
    for (std::size_t i = 1; i <= 3; ++i) {
        const double v[1] = {0.01 * static_cast<double>(i)};
        s.set_inflation_loading(3, i, v);
    }
    CHECK(s.inflation_variance(3) ==
          Approx(0.01 * 0.01 + 0.02 * 0.02 + 0.03 * 0.03).epsilon(1e-14));
    CHECK(s.implied_caplet_vol(3) ==
          Approx(std::sqrt((0.0001 + 0.0004 + 0.0009) / 3.0)).epsilon(1e-14));
}

TEST_CASE("single-period bond volatility from a forward-start grid") {
    const TenorGrid grid({1.0, 2.0}, true);
    std::vector<double> nv = {0.15};
    std::vector<double> iv = {0.004};
    const VolSurface vols =
        VolSurface::two_factor(grid, nv, iv, CorrelationSpec::two_factor(0.0));
    const auto nominal = NominalCurve::build({{1.0, 0.98}, {2.0, 0.98 / 1.04}});
    const auto sig = nominal_bond_vol(vols, nominal, 0, 0.5);
    CHECK(sig[0] == Approx(-0.0057692307692307696).epsilon(1e-13));
    CHECK(sig[1] == 0.0);
    CHECK_THROWS_AS(nominal_bond_vol(vols, nominal, 5, 0.5), ModelError);
    CHECK_THROWS_AS(nominal_bond_vol(vols, nominal, 0, 1.5), ModelError);
}

TEST_CASE("bond vol with zero forwards is the zero vector") {
    const TenorGrid grid = TenorGrid::annual(4);
    const VolSurface vols = make_surface(grid, 0.0);
    const std::vector<double> f(4, 0.0);
    const auto w = drift_weights(grid, f);
    double out[2] = {99.0, 99.0};
    bond_vol(vols, w, 1, 4, out);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.0);
}

TEST_CASE("bond vol matches an independent direct summation") {
    const TenorGrid grid = TenorGrid::annual(4);
    VolSurface vols(grid, 2);
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.05, 0.3);
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t i = 0; i <= k; ++i) {
            const double v[2] = {u(gen), u(gen)};
            vols.set_nominal_loading(k, i, v);
        }
    std::vector<double> f = {0.03, 0.04, 0.05, 0.045};
    const auto w = drift_weights(grid, f);

    for (std::size_t itv = 1; itv <= 2; ++itv) {
        for (std::size_t M = itv; M <= 4; ++M) {
            double out[2];
            bond_vol(vols, w, itv, M, out);
            // oracle: accumulate in reverse order, independently
            double oracle[2] = {0.0, 0.0};
            for (std::size_t k = M; k-- > itv;) {
                const double af = grid.accrual(k + 1) * f[k];
                const double wk = af / (1.0 + af);
                oracle[0] -= wk * vols.nominal_loading(k, itv)[0];
                oracle[1] -= wk * vols.nominal_loading(k, itv)[1];
            }
            CHECK(out[0] == Approx(oracle[0]).margin(1e-15));
            CHECK(out[1] == Approx(oracle[1]).margin(1e-15));
        }
    }
}

TEST_CASE("simulation: serial and OpenMP are bitwise identical") {
    const TestMarket mkt = make_market(6.0);
    const TenorGrid grid = TenorGrid::annual(5);
    const JointModel model =
        JointModel::from_curves(mkt.nominal, mkt.inflation, make_surface(grid, -0.0535));

    McConfig cfg;
    cfg.measure = Measure::Spot;
    cfg.horizon_index = 4;
    cfg.paths = 2000;
    cfg.seed = 11;
    Payoff payoff{"mu4", [](const PathState& st) { return st.mu(4); }, false};
    const auto serial = mc_value(model, cfg, {payoff}, ExecutionMode::Serial);
    const auto parallel = mc_value(model, cfg, {payoff}, ExecutionMode::OpenMP);
    CHECK(serial[0].value == parallel[0].value);
    CHECK(serial[0].std_error == parallel[0].std_error);

    const PathSet ps1 = simulate(model, cfg, ExecutionMode::Serial);
    const PathSet ps2 = simulate(model, cfg, ExecutionMode::OpenMP);
    REQUIRE(ps1.values.size() == ps2.values.size());
    CHECK(ps1.values == ps2.values);
}

TEST_CASE("simulation is reproducible from the seed and sensitive to it") {
    const TestMarket mkt = make_market(4.0);
    const TenorGrid grid = TenorGrid::annual(3);
    const JointModel model =
        JointModel::from_curves(mkt.nominal, mkt.inflation, make_surface(grid, 0.0));
    McConfig cfg;
    cfg.horizon_index = 3;
    cfg.paths = 64;
    cfg.seed = 5;
    const PathSet a = simulate(model, cfg);
    const PathSet b = simulate(model, cfg);
    CHECK(a.values == b.values);
    cfg.seed = 6;
    const PathSet c = simulate(model, cfg);
    CHECK(a.values != c.values);
}

TEST_CASE("zero inflation vol keeps mu constant along every path") {
    const TestMarket mkt = make_market(4.0);
    const TenorGrid grid = TenorGrid::annual(3);
    const JointModel model =
        JointModel::from_curves(mkt.nominal, mkt.inflation, make_surface(grid, 0.0, 0.0));
    McConfig cfg;
    cfg.horizon_index = 3;
    cfg.paths = 16;
    cfg.seed = 2;
    const PathSet ps = simulate(model, cfg);
    const std::size_t n = grid.periods();
    for (std::int64_t p = 0; p < cfg.paths; ++p)
        for (std::size_t s = 0; s < ps.times.size(); ++s)
            for (std::size_t j = 1; j <= n; ++j)
                CHECK(ps.value(p, s, n + j - 1) ==
                      Approx(model.displaced_inflation(j)).epsilon(1e-15));
    // nominal forwards still move (f_0 is fixed at T_0 = 0, f_1 is not)
    CHECK(ps.value(0, ps.times.size() - 1, 1) != model.nominal_forward(1));
}

TEST_CASE("positivity holds on simulated paths") {
    const TestMarket mkt = make_market(4.0);
    const TenorGrid grid = TenorGrid::annual(3);
    const JointModel model =
        JointModel::from_curves(mkt.nominal, mkt.inflation, make_surface(grid, -0.5, 0.02));
    McConfig cfg;
    cfg.horizon_index = 3;
    cfg.paths = 500;
    cfg.seed = 3;
    const PathSet ps = simulate(model, cfg);
    for (double v : ps.values) CHECK(v > 0.0);
}

TEST_CASE("displaced inflation forward is a martingale under its forward measure") {
    const TestMarket mkt = make_market(6.0);
    const TenorGrid grid = TenorGrid::annual(5);
    const JointModel model =
        JointModel::from_curves(mkt.nominal, mkt.inflation, make_surface(grid, -0.0535));

    McConfig cfg;
    cfg.measure = Measure::Forward;
    cfg.forward_index = 5;
    cfg.horizon_index = 5;
    cfg.paths = 60000;
    cfg.seed = 17;
    Payoff mu5{"mu5", [](const PathState& st) { return st.mu(5); }, false};
    Payoff f_infl{"f_infl", [](const PathState& st) { return st.mu(5) - 1.0; }, false};
    const auto est = mc_value(model, cfg, {mu5, f_infl});
    CHECK(std::fabs(est[0].value - model.displaced_inflation(5)) < 3.0 * est[0].std_error);
    // the plain inflation forward inherits the martingale property
    CHECK(std::fabs(est[1].value - (model.displaced_inflation(5) - 1.0)) <
          3.0 * est[1].std_error);
    CHECK(est[0].std_error > 0.0);
}

TEST_CASE("displaced swap rate is a martingale under the annuity measure") {
    const TestMarket mkt = make_market(6.0);
    const TenorGrid grid = TenorGrid::annual(5);
    const JointModel model =
        JointModel::from_curves(mkt.nominal, mkt.inflation, make_surface(grid, -0.0535));

    const std::size_t m = 2, n = 5;
    McConfig cfg;
    cfg.measure = Measure::Annuity;
    cfg.swap_start = m;
    cfg.swap_end = n;
    cfg.horizon_index = m;
    cfg.paths = 60000;
    cfg.seed = 23;
    Payoff s_disp{"s_disp",
                  [m, n](const PathState& st) { return st.displaced_swap_rate(m, n); }, false};
    const auto est = mc_value(model, cfg, {s_disp});

    // time-0 value of sum omega_i mu_i
    double annuity = 0.0, target = 0.0;
    for (std::size_t i = m + 1; i <= n; ++i) {
        const double w = grid.accrual(i) * mkt.nominal.discount(grid.date(i));
        annuity += w;
        target += w * model.displaced_inflation(i);
    }
    target /= annuity;
    CHECK(std::fabs(est[0].value - target) < 3.0 * est[0].std_error);
}

TEST_CASE("caplet prices agree across spot and forward measures") {
    const TestMarket mkt = make_market(5.0);
    const TenorGrid grid = TenorGrid::annual(4);
    const JointModel model =
        JointModel::from_curves(mkt.nominal, mkt.inflation, make_surface(grid, -0.0535));
    const std::size_t j = 3;
    const double strike = 0.02;
    const double kt = strike + 1.0;

    Payoff paid_at_tj{"caplet",
                      [j, kt](const PathState& st) { return std::max(st.mu(j) - kt, 0.0); },
                      true};

    McConfig fwd;
    fwd.measure = Measure::Forward;
    fwd.forward_index = j;
    fwd.horizon_index = j;
    fwd.paths = 60000;
    fwd.seed = 31;
    const auto est_fwd = mc_value(model, fwd, {paid_at_tj});

    McConfig spot = fwd;
    spot.measure = Measure::Spot;
    spot.seed = 32;
    const auto est_spot = mc_value(model, spot, {paid_at_tj});

    const double combined = std::hypot(est_fwd[0].std_error, est_spot[0].std_error);
    CHECK(std::fabs(est_fwd[0].value - est_spot[0].value) < 3.0 * combined);
}

TEST_CASE("zero-vol pricing is exact with zero standard error") {
    const TestMarket mkt = make_market(4.0);
    const TenorGrid grid = TenorGrid::annual(3);
    const JointModel model =
        JointModel::from_curves(mkt.nominal, mkt.inflation, make_surface(grid, 0.0, 0.0));
    const std::size_t j = 2;
    const double kt = 0.02 + 1.0;
    McConfig cfg;
    cfg.measure = Measure::Forward;
    cfg.forward_index = j;
    cfg.horizon_index = j;
    cfg.paths = 64;
    cfg.seed = 9;
    Payoff payoff{"caplet",
                  [j, kt](const PathState& st) { return std::max(st.mu(j) - kt, 0.0); }, true};
    const auto est = mc_value(model, cfg, {payoff});
    // every path carries the same deterministic payoff; the SE collapses to
    // summation noise
    CHECK(est[0].std_error < 1e-16 * std::max(est[0].value, 1.0));
    const double intrinsic = mkt.nominal.discount(2.0) *
                             std::max(model.displaced_inflation(j) - kt, 0.0);
    CHECK(est[0].value == Approx(intrinsic).epsilon(1e-13));
}

TEST_CASE("results do not depend on the OpenMP thread count") {
    const TestMarket mkt = make_market(4.0);
    const TenorGrid grid = TenorGrid::annual(3);
    const JointModel model =
        JointModel::from_curves(mkt.nominal, mkt.inflation, make_surface(grid, -0.0535));
    McConfig cfg;
    cfg.horizon_index = 3;
    cfg.paths = 1000;
    cfg.seed = 77;
    Payoff payoff{"mu3", [](const PathState& st) { return st.mu(3); }, false};

    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto one = mc_value(model, cfg, {payoff}, ExecutionMode::OpenMP);
    omp_set_num_threads(2);
    const auto two = mc_value(model, cfg, {payoff}, ExecutionMode::OpenMP);
    omp_set_num_threads(saved);
    CHECK(one[0].value == two[0].value);
    CHECK(one[0].std_error == two[0].std_error);
}

TEST_CASE("full path recording refuses absurd sizes") {
    const TestMarket mkt = make_market(4.0);
    const TenorGrid grid = TenorGrid::annual(3);
    const JointModel model =
        JointModel::from_curves(mkt.nominal, mkt.inflation, make_surface(grid, 0.0));
    McConfig cfg;
    cfg.horizon_index = 3;
    cfg.paths = 50000000;
    CHECK_THROWS_WITH(simulate(model, cfg),
                      Catch::Matchers::ContainsSubstring("too large"));
}

TEST_CASE("engine validates its configuration") {
    const TestMarket mkt = make_market(4.0);
    const TenorGrid grid = TenorGrid::annual(3);
    const JointModel model =
        JointModel::from_curves(mkt.nominal, mkt.inflation, make_surface(grid, 0.0));
    McConfig cfg;
    cfg.horizon_index = 0;
    CHECK_THROWS_AS(simulate(model, cfg), ModelError);
    cfg.horizon_index = 9;
    CHECK_THROWS_AS(simulate(model, cfg), ModelError);
    cfg.horizon_index = 2;
    cfg.measure = Measure::Forward;
    cfg.forward_index = 1;  // numeraire matures before the horizon
    CHECK_THROWS_AS(simulate(model, cfg), ModelError);
    cfg.measure = Measure::Annuity;
    cfg.swap_start = 2;
    cfg.swap_end = 2;
    CHECK_THROWS_AS(simulate(model, cfg), ModelError);
    cfg.measure = Measure::Spot;
    cfg.paths = 7;  // odd antithetic count
    CHECK_THROWS_AS(simulate(model, cfg), ModelError);
}
