#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ilmm/errors.hpp"
#include "ilmm/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
    std::string config_path;
    std::string output_dir;
    double nominal_vol = -1.0;
    double rho = -999.0;
    double alpha = -1.0;
    double beta = -1.0;
    double strike_pct = -1.0;
    long long paths = -1;
    int steps_per_year = -1;
    long long seed = -1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file")->required();
    cmd->add_option("--output-dir", f.output_dir, "override output directory");
    cmd->add_option("--nominal-vol", f.nominal_vol, "flat nominal forward vol");
    cmd->add_option("--rho", f.rho, "nominal/inflation factor correlation");
    cmd->add_option("--alpha", f.alpha, "vol smoothness weight");
    cmd->add_option("--beta", f.beta, "correlation smoothness weight");
    cmd->add_option("--strike-pct", f.strike_pct, "calibration strike in percent");
    cmd->add_option("--paths", f.paths, "Monte Carlo paths");
    cmd->add_option("--steps-per-year", f.steps_per_year, "Monte Carlo steps per year");
    cmd->add_option("--seed", f.seed, "Monte Carlo seed");
}

ilmm::RunConfig resolve(const CommonFlags& f) {
    ilmm::RunConfig cfg = ilmm::load_config(f.config_path);
    if (!f.output_dir.empty()) cfg.output_dir = f.output_dir;
    if (f.nominal_vol >= 0.0) cfg.nominal_flat_vol = f.nominal_vol;
    if (f.rho > -2.0) cfg.rho = f.rho;
    if (f.alpha > 0.0) cfg.alpha = f.alpha;
    if (f.beta > 0.0) cfg.beta = f.beta;
    if (f.strike_pct > 0.0) cfg.calibration_strike = f.strike_pct / 100.0;
    if (f.paths > 0) cfg.mc.paths = f.paths;
    if (f.steps_per_year > 0) cfg.mc.steps_per_year = f.steps_per_year;
    if (f.seed >= 0) cfg.mc.seed = static_cast<std::uint64_t>(f.seed);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ilmm: curves, calibration, pricing and simulation for "
                 "year-on-year inflation derivatives"};
    app.require_subcommand(1);

    CommonFlags curves_f, calib_f, price_f, sim_f;
    auto* curves_cmd = app.add_subcommand("curves", "build curves and write the tenor table");
    add_common(curves_cmd, curves_f);
    auto* calib_cmd =
        app.add_subcommand("calibrate", "bootstrap caplet vols and solve the regularized fit");
    add_common(calib_cmd, calib_f);
    auto* price_cmd = app.add_subcommand("price", "price the instrument book");
    add_common(price_cmd, price_f);
    bool want_grid = false;
    price_cmd->add_flag("--swaption-grid", want_grid, "emit the swaption price grid");
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo check of one instrument");
    add_common(sim_cmd, sim_f);
    std::string sim_id;
    bool dump_paths = false;
    sim_cmd->add_option("--instrument", sim_id, "book row id to simulate");
    sim_cmd->add_flag("--dump-paths", dump_paths, "also write a small path dump");

    CLI11_PARSE(app, argc, argv);

    try {
        if (curves_cmd->parsed()) {
            ilmm::run_curves(resolve(curves_f));
            std::cout << "curves.csv written\n";
        } else if (calib_cmd->parsed()) {
            const auto run = ilmm::run_calibrate(resolve(calib_f));
            std::cout << (run.result.converged ? "calibration converged"
                                               : "calibration NOT converged")
                      << ", objective " << run.result.objective << "\n";
            if (!run.result.converged) {
                std::cerr << run.result.message << "\n";
                return kExitNumerical;
            }
        } else if (price_cmd->parsed()) {
            ilmm::RunConfig cfg = resolve(price_f);
            if (want_grid) cfg.swaption_grid = true;
            const auto records = ilmm::run_price(cfg);
            std::size_t bad = 0;
            for (const auto& r : records)
                if (!r.ok) ++bad;
            std::cout << records.size() << " rows priced, " << bad << " errored\n";
        } else if (sim_cmd->parsed()) {
            ilmm::RunConfig cfg = resolve(sim_f);
            if (!sim_id.empty()) cfg.sim_instrument_id = sim_id;
            if (dump_paths) cfg.dump_paths = true;
            const auto rows = ilmm::run_simulate(cfg);
            for (const auto& r : rows)
                std::cout << r.id << " (" << r.kind << ", " << r.measure << " measure): MC "
                          << r.mc_value << " +/- " << r.mc_std_error << ", closed form "
                          << r.closed_form << "\n";
        }
    } catch (const ilmm::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ilmm::CurveError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ilmm::ArbitrageError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const ilmm::ModelError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
