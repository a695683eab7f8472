#include "ilmm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "ilmm/errors.hpp"
#include "ilmm/joint_model.hpp"
#include "ilmm/quotes_io.hpp"
#include "json.hpp"

namespace ilmm {

RunConfig load_config(const std::string& path) {
    RunConfig cfg;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw InputError("config '" + path + "': " + e.what());
    }
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("zciis", cfg.zciis_path);
    get("caps", cfg.caps_path);
    get("nominal_curve", cfg.nominal_curve_path);
    get("cpi_fixings", cfg.cpi_fixings_path);
    get("book", cfg.book_path);
    get("nominal_flat_vol", cfg.nominal_flat_vol);
    get("rho", cfg.rho);
    get("alpha", cfg.alpha);
    get("beta", cfg.beta);
    get("time_homogeneous", cfg.time_homogeneous);
    get("output_dir", cfg.output_dir);
    get("sim_instrument_id", cfg.sim_instrument_id);
    get("dump_paths", cfg.dump_paths);
    get("dump_path_count", cfg.dump_path_count);
    get("swaption_grid", cfg.swaption_grid);
    if (j.contains("calibration_strike_pct"))
        cfg.calibration_strike = j.at("calibration_strike_pct").get<double>() / 100.0;
    if (j.contains("mc")) {
        const auto& m = j.at("mc");
        if (m.contains("paths")) cfg.mc.paths = m.at("paths").get<std::int64_t>();
        if (m.contains("steps_per_year")) cfg.mc.steps_per_year = m.at("steps_per_year").get<int>();
        if (m.contains("seed")) cfg.mc.seed = m.at("seed").get<std::uint64_t>();
        if (m.contains("antithetic")) cfg.mc.antithetic = m.at("antithetic").get<bool>();
    }
    if (cfg.output_dir.empty() || !j.contains("output_dir")) {
        if (const char* env = std::getenv("ILMM_OUTPUT_DIR")) cfg.output_dir = env;
    }
    if (!(cfg.alpha > 0.0)) throw InputError("config: alpha must be positive");
    if (cfg.mc.paths < 1) throw InputError("config: mc.paths must be at least 1");
    return cfg;
}

namespace {

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw InputError(std::string("config: missing required input '") + what + "'");
    if (path != "-" && !std::filesystem::exists(path))
        throw InputError(std::string(what) + " file '" + path + "' does not exist");
}

std::filesystem::path ensure_outdir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.output_dir.empty() ? "out" : cfg.output_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

Market build_market(const RunConfig& config) {
    require_file(config.zciis_path, "zciis");
    require_file(config.nominal_curve_path, "nominal_curve");

    const auto zciis = parse_quotes(config.zciis_path, QuoteKind::Zciis);
    const auto curve = parse_quotes(config.nominal_curve_path, QuoteKind::NominalCurve);

    Market mkt;
    std::vector<CurvePillar> pillars = curve.curve;
    std::sort(pillars.begin(), pillars.end(),
              [](const CurvePillar& a, const CurvePillar& b) { return a.maturity < b.maturity; });
    mkt.nominal = NominalCurve::build(pillars);

    std::vector<ZciisQuote> quotes = zciis.zciis;
    std::sort(quotes.begin(), quotes.end(),
              [](const ZciisQuote& a, const ZciisQuote& b) { return a.maturity < b.maturity; });
    mkt.real = real_curve_from_zciis(mkt.nominal, quotes);
    mkt.inflation = InflationCurve::build(mkt.nominal, mkt.real);

    if (!config.cpi_fixings_path.empty()) {
        const auto fx = parse_quotes(config.cpi_fixings_path, QuoteKind::CpiFixings);
        mkt.inflation.set_fixings(fx.fixings);
    }

    const double last = quotes.back().maturity;
    const int n = static_cast<int>(std::lround(last));
    if (std::abs(last - n) > 1e-9)
        throw InputError("pipeline grid requires integer-year quote maturities; got " +
                         std::to_string(last));
    mkt.grid = TenorGrid::annual(n);
    return mkt;
}

std::vector<CurveReportRow> curve_report(const Market& market) {
    std::vector<CurveReportRow> rows;
    for (std::size_t j = 1; j <= market.grid.periods(); ++j) {
        CurveReportRow r;
        r.tenor = market.grid.date(j);
        r.p_nominal = market.nominal.discount(r.tenor);
        r.p_real = market.real.discount(r.tenor);
        r.p_inflation = market.inflation.discount(r.tenor);
        r.fwd_nominal = market.nominal.forward_rate(market.grid.date(j - 1), r.tenor);
        r.fwd_inflation = inflation_forward(market.inflation, market.grid.date(j - 1), r.tenor);
        rows.push_back(r);
    }
    return rows;
}

void run_curves(const RunConfig& config) {
    const Market mkt = build_market(config);
    const auto rows = curve_report(mkt);
    std::ostringstream out;
    out << "tenor_years,discount_nominal,discount_real,discount_inflation,"
           "fwd_nominal,fwd_inflation\n";
    for (const auto& r : rows)
        out << format_double(r.tenor) << "," << format_double(r.p_nominal) << ","
            << format_double(r.p_real) << "," << format_double(r.p_inflation) << ","
            << format_double(r.fwd_nominal) << "," << format_double(r.fwd_inflation) << "\n";
    write_text_file((ensure_outdir(config) / "curves.csv").string(), out.str());
}

CalibrationRun run_calibrate(const RunConfig& config, bool write_outputs) {
    require_file(config.caps_path, "caps");
    CalibrationRun run{build_market(config), {}};
    const Market& mkt = run.market;

    const auto capfile = parse_quotes(config.caps_path, QuoteKind::Cap);
    std::vector<CalibrationTarget> targets;
    for (const auto& q : capfile.caps) {
        if (std::abs(q.strike - config.calibration_strike) < 1e-12)
            targets.push_back(CalibrationTarget::cap_price(mkt.grid.index_of(q.maturity),
                                                           q.strike, q.price));
    }
    if (targets.empty())
        throw InputError("no cap quotes at the calibration strike " +
                         std::to_string(config.calibration_strike));

    CalibrationOptions opt;
    opt.alpha = config.alpha;
    opt.beta = config.beta;
    opt.rho = config.rho;
    opt.solve_rho = false;
    opt.time_homogeneous = config.time_homogeneous;
    opt.nominal_vol.assign(mkt.grid.periods(), config.nominal_flat_vol);
    run.result = calibrate_nonparametric(mkt.nominal, mkt.inflation, mkt.grid, targets, opt);

    if (write_outputs) {
        const auto dir = ensure_outdir(config);
        write_text_file((dir / "calibration.json").string(),
                        calibration_result_json(run.result, mkt.grid));
        write_text_file((dir / "vol_matrix.csv").string(),
                        vol_matrix_csv(run.result, mkt.grid));

        // repricing diagnostics across every quoted strike; only the
        // calibration strike is expected to match
        std::ostringstream diag;
        diag << "maturity_years,strike_pct,market_bps,model_bps,diff_bps,calibrated\n";
        for (const auto& q : capfile.caps) {
            const std::size_t n = mkt.grid.index_of(q.maturity);
            const double model =
                price_cap(mkt.nominal, mkt.inflation, run.result.surface, n, q.strike, 1.0);
            const bool fitted = std::abs(q.strike - config.calibration_strike) < 1e-12;
            diag << format_double(q.maturity) << "," << format_double_scaled(q.strike, 2) << ","
                 << format_double_scaled(q.price, 4) << "," << format_double_scaled(model, 4)
                 << "," << format_double_scaled(model - q.price, 4) << ","
                 << (fitted ? "yes" : "no") << "\n";
        }
        write_text_file((dir / "cap_repricing.csv").string(), diag.str());
    }
    return run;
}

std::vector<PriceRecord> run_price(const RunConfig& config, bool write_outputs) {
    require_file(config.book_path, "book");
    const CalibrationRun run = run_calibrate(config, false);
    const Market& mkt = run.market;
    const auto book = parse_quotes(config.book_path, QuoteKind::InstrumentBook);

    std::vector<PriceRecord> records;
    for (const auto& instr : book.book)
        records.push_back(
            price_instrument(mkt.nominal, mkt.real, mkt.inflation, run.result.surface, instr));

    if (write_outputs) {
        const auto dir = ensure_outdir(config);
        write_text_file((dir / "price_report.csv").string(), price_report_csv(records));

        if (config.swaption_grid) {
            std::ostringstream grid_out;
            grid_out << "expiry_years,tenor_years,strike_pct,price_per_notional\n";
            const std::vector<std::size_t> expiries = {1, 2, 3, 5, 7, 10};
            const std::vector<std::size_t> tenors = {1, 2, 3, 5, 10, 15, 20};
            const std::vector<double> strikes = {0.01, 0.02, 0.03, 0.04};
            for (std::size_t m : expiries) {
                for (std::size_t tenor : tenors) {
                    const std::size_t n = m + tenor;
                    if (n > mkt.grid.periods()) continue;
                    for (double k : strikes) {
                        const double pv = price_swaption(mkt.nominal, mkt.inflation,
                                                         run.result.surface, m, n, k, 1.0);
                        grid_out << m << "," << tenor << "," << format_double_scaled(k, 2) << ","
                                 << format_double(pv) << "\n";
                    }
                }
            }
            write_text_file((dir / "swaption_grid.csv").string(), grid_out.str());
        }
    }
    return records;
}

std::vector<SimReportRow> run_simulate(const RunConfig& config, bool write_outputs) {
    require_file(config.book_path, "book");
    const CalibrationRun run = run_calibrate(config, false);
    const Market& mkt = run.market;
    const VolSurface& surface = run.result.surface;
    const auto book = parse_quotes(config.book_path, QuoteKind::InstrumentBook);

    const Instrument* chosen = nullptr;
    for (const auto& instr : book.book) {
        if (!config.sim_instrument_id.empty()) {
            if (instr.id == config.sim_instrument_id) {
                chosen = &instr;
                break;
            }
        } else if (instr.kind == Instrument::Kind::Caplet ||
                   instr.kind == Instrument::Kind::Cap ||
                   instr.kind == Instrument::Kind::Swaption) {
            chosen = &instr;
            break;
        }
    }
    if (!chosen)
        throw InputError(config.sim_instrument_id.empty()
                             ? "book has no caplet/cap/swaption row to simulate"
                             : "book has no row with id '" + config.sim_instrument_id + "'");

    const JointModel model = JointModel::from_curves(mkt.nominal, mkt.inflation, surface);
    McConfig mc;
    mc.paths = config.mc.paths;
    mc.steps_per_year = config.mc.steps_per_year;
    mc.seed = config.mc.seed;
    mc.antithetic = config.mc.antithetic;

    std::vector<SimReportRow> rows;
    SimReportRow row;
    row.id = chosen->id;
    row.kind = Instrument::kind_name(chosen->kind);

    const double notional = chosen->notional;
    const double strike = chosen->strike;
    if (chosen->kind == Instrument::Kind::Caplet) {
        const std::size_t j = mkt.grid.index_of(chosen->end);
        mc.measure = Measure::Forward;
        mc.forward_index = j;
        mc.horizon_index = j;
        row.measure = "forward";
        const double a = mkt.grid.accrual(j);
        const double kt = strike + 1.0 / a;
        Payoff payoff{"caplet", [j, a, kt, notional](const PathState& st) {
                          return notional * a * std::max(st.mu(j) - kt, 0.0);
                      },
                      true};
        const auto est = mc_value(model, mc, {payoff});
        row.mc_value = est[0].value;
        row.mc_std_error = est[0].std_error;
        row.closed_form = price_caplet(mkt.nominal, mkt.inflation, surface, j, strike, notional);
    } else if (chosen->kind == Instrument::Kind::Cap) {
        const std::size_t n = mkt.grid.index_of(chosen->end);
        mc.measure = Measure::Spot;
        mc.horizon_index = n;
        row.measure = "spot";
        const TenorGrid& grid = mkt.grid;
        Payoff payoff{"cap", [n, strike, notional, &grid](const PathState& st) {
                          // sum of caplet cash flows rolled up at the spot numeraire
                          double v = 0.0;
                          double bh = st.money_market();
                          for (std::size_t j = 1; j <= n; ++j) {
                              double bj = 1.0;
                              for (std::size_t k = 0; k < j; ++k)
                                  bj *= 1.0 + grid.accrual(k + 1) * st.f(k);
                              const double a = grid.accrual(j);
                              const double kt = strike + 1.0 / a;
                              v += a * std::max(st.mu(j) - kt, 0.0) * bh / bj;
                          }
                          return notional * v;
                      },
                      true};
        const auto est = mc_value(model, mc, {payoff});
        row.mc_value = est[0].value;
        row.mc_std_error = est[0].std_error;
        row.closed_form = price_cap(mkt.nominal, mkt.inflation, surface, n, strike, notional);
    } else {
        const std::size_t m = mkt.grid.index_of(chosen->start);
        const std::size_t n = mkt.grid.index_of(chosen->end);
        mc.measure = Measure::Spot;
        mc.horizon_index = m;
        row.measure = "spot";
        Payoff payoff{"swaption", [m, n, strike, notional](const PathState& st) {
                          const double s = st.swap_rate(m, n);
                          return notional * st.annuity(m, n) * std::max(s - strike, 0.0);
                      },
                      true};
        const auto est = mc_value(model, mc, {payoff});
        row.mc_value = est[0].value;
        row.mc_std_error = est[0].std_error;
        row.closed_form =
            price_swaption(mkt.nominal, mkt.inflation, surface, m, n, strike, notional);
    }
    rows.push_back(row);

    if (write_outputs) {
        const auto dir = ensure_outdir(config);
        std::ostringstream out;
        out << "id,kind,measure,mc_value,mc_std_error,closed_form\n";
        for (const auto& r : rows)
            out << r.id << "," << r.kind << "," << r.measure << "," << format_double(r.mc_value)
                << "," << format_double(r.mc_std_error) << "," << format_double(r.closed_form)
                << "\n";
        write_text_file((dir / "mc_report.csv").string(), out.str());

        if (config.dump_paths) {
            McConfig dump_cfg = mc;
            dump_cfg.paths = std::min<std::int64_t>(config.dump_path_count, mc.paths);
            if (dump_cfg.antithetic && dump_cfg.paths % 2 != 0) ++dump_cfg.paths;
            const PathSet ps = simulate(model, dump_cfg);
            std::ostringstream dump;
            dump << "path,step,time,variable,value\n";
            for (std::int64_t p = 0; p < ps.paths; ++p)
                for (std::size_t s = 0; s < ps.times.size(); ++s)
                    for (std::size_t v = 0; v < ps.n_vars; ++v)
                        dump << p << "," << s << "," << format_double(ps.times[s]) << ","
                             << ps.var_name(v) << "," << format_double(ps.value(p, s, v)) << "\n";
            write_text_file((dir / "paths.csv").string(), dump.str());
        }
    }
    return rows;
}

}  // namespace ilmm
