#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ilmm/calibration.hpp"
#include "ilmm/curves.hpp"
#include "ilmm/pricing.hpp"

namespace ilmm {

enum class QuoteKind { Zciis, Cap, NominalCurve, CpiFixings, InstrumentBook };

QuoteKind parse_quote_kind(const std::string& name);
std::string quote_kind_name(QuoteKind kind);

/// Typed contents of one quote file. Percent and basis-point columns are
/// converted to decimals at ingestion (exact decimal-point shifts, so writing
/// converts back without rounding).
struct QuoteFile {
    QuoteKind kind = QuoteKind::Zciis;
    std::string source;  // path or label, for error context
    std::vector<ZciisQuote> zciis;
    std::vector<CapQuote> caps;           // price per unit notional
    std::vector<CurvePillar> curve;       // discount factors
    std::vector<CpiFixing> fixings;
    std::vector<Instrument> book;
};

bool operator==(const QuoteFile& a, const QuoteFile& b);

/// Parse a file (path "-" reads stdin) with the exact schema for `kind`.
QuoteFile parse_quotes(const std::string& path, QuoteKind kind);
QuoteFile parse_quotes_text(std::string_view text, QuoteKind kind, const std::string& source);

/// Inverse of parse: exact header plus one row per record, numbers at
/// 17 significant digits. parse(format(x)) == x bitwise.
std::string format_quotes(const QuoteFile& file);
void write_quotes(const QuoteFile& file, const std::string& path);

/// Locale-independent serialization helpers (17 significant digits).
std::string format_double(double v);
/// Parse with an exact decimal exponent shift: parse_double("2.25", -2) is
/// the double nearest to 0.0225, with no intermediate rounding.
double parse_double(std::string_view token, int pow10_shift = 0);
/// Textual inverse: value printed at 17 digits with the decimal point moved.
std::string format_double_scaled(double v, int pow10_shift);

/// Price report: id,kind,status,pv,pv_per_notional,vol_used,error
std::string price_report_csv(const std::vector<PriceRecord>& records);
std::vector<PriceRecord> parse_price_report_csv(std::string_view text);

/// Calibration result as JSON (surface, correlation, residuals, diagnostics)
/// and as a grid x time CSV vol matrix.
std::string calibration_result_json(const CalibrationResult& result, const TenorGrid& grid);
struct SurfaceData {
    std::vector<double> grid_dates;
    std::vector<std::vector<double>> inflation_vols;
    std::vector<double> rho;
};
SurfaceData surface_from_json(std::string_view json_text);
std::string vol_matrix_csv(const CalibrationResult& result, const TenorGrid& grid);

void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

}  // namespace ilmm
