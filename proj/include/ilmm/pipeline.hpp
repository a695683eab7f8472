#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ilmm/calibration.hpp"
#include "ilmm/curves.hpp"
#include "ilmm/pricing.hpp"
#include "ilmm/simulate.hpp"

namespace ilmm {

struct McSettings {
    std::int64_t paths = 200000;
    int steps_per_year = 4;
    std::uint64_t seed = 42;
    bool antithetic = true;
};

/// One run's inputs and parameters. Loaded from a JSON config file; CLI flags
/// override individual fields after loading.
struct RunConfig {
    std::string zciis_path;
    std::string caps_path;
    std::string nominal_curve_path;
    std::string cpi_fixings_path;  // optional
    std::string book_path;         // optional, needed by price/simulate
    double nominal_flat_vol = 0.15;
    double rho = -0.0535;
    double alpha = 1.0;
    double beta = 1.0;
    double calibration_strike = 0.02;  // decimal
    bool time_homogeneous = true;
    McSettings mc;
    std::string output_dir = "out";
    std::string sim_instrument_id;  // simulate: book row to price by MC (default: first)
    bool dump_paths = false;
    std::int64_t dump_path_count = 16;
    bool swaption_grid = false;  // price: also emit the swaption price grid
};

RunConfig load_config(const std::string& path);

struct Market {
    TenorGrid grid;
    NominalCurve nominal;
    RealCurve real;
    InflationCurve inflation;
};

/// Parse the quote files and build the three curves on an annual grid out to
/// the longest quoted maturity.
Market build_market(const RunConfig& config);

struct CurveReportRow {
    double tenor;
    double p_nominal, p_real, p_inflation;
    double fwd_nominal, fwd_inflation;
};

std::vector<CurveReportRow> curve_report(const Market& market);

/// curves subcommand: writes curves.csv into the output directory.
void run_curves(const RunConfig& config);

struct CalibrationRun {
    Market market;
    CalibrationResult result;
};

/// calibrate subcommand: bootstrap + regularized solve on the configured
/// strike column, then write calibration.json, vol_matrix.csv and the
/// all-strikes repricing diagnostics.
CalibrationRun run_calibrate(const RunConfig& config, bool write_outputs = true);

/// price subcommand: prices the instrument book on the calibrated surface.
std::vector<PriceRecord> run_price(const RunConfig& config, bool write_outputs = true);

struct SimReportRow {
    std::string id;
    std::string kind;
    std::string measure;
    double mc_value = 0.0;
    double mc_std_error = 0.0;
    double closed_form = 0.0;
};

/// simulate subcommand: MC-prices the designated instrument and reports the
/// estimate with its standard error next to the closed form.
std::vector<SimReportRow> run_simulate(const RunConfig& config, bool write_outputs = true);

}  // namespace ilmm
