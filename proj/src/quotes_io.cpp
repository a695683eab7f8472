#include "ilmm/quotes_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ilmm/errors.hpp"
#include "json.hpp"

namespace ilmm {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& msg) {
    throw InputError(source + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Move the decimal point of a plain/scientific literal by `shift` places.
/// Works on the textual representation, so no floating-point rounding occurs.
std::string shift_decimal(const std::string& text, int shift) {
    if (shift == 0) return text;
    std::string s = text;
    // pull out an explicit exponent if present, adjust, and re-emit
    const std::size_t epos = s.find_first_of("eE");
    if (epos != std::string::npos) {
        const int exp = std::stoi(s.substr(epos + 1));
        return s.substr(0, epos) + "e" + std::to_string(exp + shift);
    }
    bool neg = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        neg = s[0] == '-';
        s.erase(0, 1);
    }
    std::size_t dot = s.find('.');
    std::string digits = dot == std::string::npos ? s : s.substr(0, dot) + s.substr(dot + 1);
    std::ptrdiff_t point = dot == std::string::npos ? static_cast<std::ptrdiff_t>(s.size())
                                                    : static_cast<std::ptrdiff_t>(dot);
    point += shift;
    while (point > static_cast<std::ptrdiff_t>(digits.size())) digits.push_back('0');
    while (point < 0) {
        digits.insert(digits.begin(), '0');
        ++point;
    }
    std::string out = digits.substr(0, static_cast<std::size_t>(point));
    const std::size_t first = out.find_first_not_of('0');
    out = first == std::string::npos ? "0" : out.substr(first);
    const std::string frac = digits.substr(static_cast<std::size_t>(point));
    if (!frac.empty()) out += "." + frac;
    return (neg ? "-" : "") + out;
}

double parse_double(std::string_view token, int pow10_shift) {
    std::string t = trim(token);
    if (t.empty()) throw InputError("empty numeric field");
    if (pow10_shift != 0) t = shift_decimal(t, pow10_shift);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw InputError("malformed number '" + std::string(token) + "'");
    return v;
}

std::string format_double_scaled(double v, int pow10_shift) {
    return shift_decimal(format_double(v), pow10_shift);
}

QuoteKind parse_quote_kind(const std::string& name) {
    if (name == "zciis") return QuoteKind::Zciis;
    if (name == "cap") return QuoteKind::Cap;
    if (name == "nominal-curve") return QuoteKind::NominalCurve;
    if (name == "cpi-fixings") return QuoteKind::CpiFixings;
    if (name == "instrument-book") return QuoteKind::InstrumentBook;
    throw InputError("unknown quote kind '" + name + "'");
}

std::string quote_kind_name(QuoteKind kind) {
    switch (kind) {
        case QuoteKind::Zciis: return "zciis";
        case QuoteKind::Cap: return "cap";
        case QuoteKind::NominalCurve: return "nominal-curve";
        case QuoteKind::CpiFixings: return "cpi-fixings";
        case QuoteKind::InstrumentBook: return "instrument-book";
    }
    return "?";
}

namespace {

const char* schema_header(QuoteKind kind) {
    switch (kind) {
        case QuoteKind::Zciis: return "maturity_years,swap_rate_pct";
        case QuoteKind::Cap: return "maturity_years,strike_pct,price_bps";
        case QuoteKind::NominalCurve: return "maturity_years,discount_factor";
        case QuoteKind::CpiFixings: return "date_years_offset,index_level";
        case QuoteKind::InstrumentBook:
            return "id,kind,start_years,end_years,freq_years,strike_pct,notional";
    }
    return "";
}

double positive_maturity(const std::string& source, std::size_t line, const std::string& tok) {
    const double t = parse_double(tok);
    if (!std::isfinite(t) || t <= 0.0)
        fail(source, line, "maturity must be positive and finite, got '" + tok + "'");
    return t;
}

}  // namespace

QuoteFile parse_quotes_text(std::string_view text, QuoteKind kind, const std::string& source) {
    QuoteFile qf;
    qf.kind = kind;
    qf.source = source;

    std::vector<std::string> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            lines.emplace_back(trim(text.substr(start, i - start)));
            start = i + 1;
        }
    }
    std::size_t ln = 0;
    while (ln < lines.size() && (lines[ln].empty() || lines[ln][0] == '#')) ++ln;
    if (ln >= lines.size()) fail(source, 1, "missing header");
    const std::string expect = schema_header(kind);
    if (lines[ln] != expect)
        fail(source, ln + 1,
             "schema mismatch for kind '" + quote_kind_name(kind) + "': expected header '" +
                 expect + "', got '" + lines[ln] + "'");

    const std::size_t ncols = split_csv(expect).size();
    for (std::size_t i = ln + 1; i < lines.size(); ++i) {
        if (lines[i].empty() || lines[i][0] == '#') continue;
        const auto cols = split_csv(lines[i]);
        if (cols.size() != ncols)
            fail(source, i + 1,
                 "expected " + std::to_string(ncols) + " columns, got " +
                     std::to_string(cols.size()));
        try {
            switch (kind) {
                case QuoteKind::Zciis:
                    qf.zciis.push_back({positive_maturity(source, i + 1, cols[0]),
                                        parse_double(cols[1], -2)});
                    break;
                case QuoteKind::Cap:
                    qf.caps.push_back({positive_maturity(source, i + 1, cols[0]),
                                       parse_double(cols[1], -2), parse_double(cols[2], -4)});
                    break;
                case QuoteKind::NominalCurve:
                    qf.curve.push_back({positive_maturity(source, i + 1, cols[0]),
                                        parse_double(cols[1])});
                    break;
                case QuoteKind::CpiFixings:
                    qf.fixings.push_back({parse_double(cols[0]), parse_double(cols[1])});
                    break;
                case QuoteKind::InstrumentBook: {
                    Instrument in;
                    in.id = cols[0];
                    in.kind = Instrument::parse_kind(cols[1]);
                    in.start = parse_double(cols[2]);
                    in.end = parse_double(cols[3]);
                    in.freq = parse_double(cols[4]);
                    in.strike = parse_double(cols[5], -2);
                    in.notional = parse_double(cols[6]);
                    qf.book.push_back(std::move(in));
                    break;
                }
            }
        } catch (const InputError& e) {
            fail(source, i + 1, e.what());
        }
        // NaN guard on everything parsed from this row
        const auto check = [&](double v) {
            if (std::isnan(v)) fail(source, i + 1, "NaN value rejected");
        };
        switch (kind) {
            case QuoteKind::Zciis: check(qf.zciis.back().rate); break;
            case QuoteKind::Cap: check(qf.caps.back().price); break;
            case QuoteKind::NominalCurve: check(qf.curve.back().value); break;
            case QuoteKind::CpiFixings: check(qf.fixings.back().level); break;
            case QuoteKind::InstrumentBook: check(qf.book.back().notional); break;
        }
    }

    // duplicate keys
    auto dup = [&](double a, double b) { return a == b; };
    switch (kind) {
        case QuoteKind::Zciis:
            for (std::size_t i = 1; i < qf.zciis.size(); ++i)
                for (std::size_t j = 0; j < i; ++j)
                    if (dup(qf.zciis[i].maturity, qf.zciis[j].maturity))
                        fail(source, 0, "duplicate ZCIIS maturity");
            break;
        case QuoteKind::Cap:
            for (std::size_t i = 1; i < qf.caps.size(); ++i)
                for (std::size_t j = 0; j < i; ++j)
                    if (dup(qf.caps[i].maturity, qf.caps[j].maturity) &&
                        dup(qf.caps[i].strike, qf.caps[j].strike))
                        fail(source, 0, "duplicate cap (maturity, strike)");
            break;
        case QuoteKind::NominalCurve:
            for (std::size_t i = 1; i < qf.curve.size(); ++i)
                for (std::size_t j = 0; j < i; ++j)
                    if (dup(qf.curve[i].maturity, qf.curve[j].maturity))
                        fail(source, 0, "duplicate curve maturity");
            break;
        case QuoteKind::CpiFixings:
            for (std::size_t i = 1; i < qf.fixings.size(); ++i)
                for (std::size_t j = 0; j < i; ++j)
                    if (dup(qf.fixings[i].offset, qf.fixings[j].offset))
                        fail(source, 0, "duplicate fixing date");
            break;
        case QuoteKind::InstrumentBook:
            for (std::size_t i = 1; i < qf.book.size(); ++i)
                for (std::size_t j = 0; j < i; ++j)
                    if (qf.book[i].id == qf.book[j].id)
                        fail(source, 0, "duplicate instrument id '" + qf.book[i].id + "'");
            break;
    }
    return qf;
}

std::string read_text_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << content;
    if (!out) throw InputError("write failed for '" + path + "'");
}

QuoteFile parse_quotes(const std::string& path, QuoteKind kind) {
    return parse_quotes_text(read_text_file(path), kind, path == "-" ? "<stdin>" : path);
}

std::string format_quotes(const QuoteFile& file) {
    std::ostringstream out;
    out << schema_header(file.kind) << "\n";
    switch (file.kind) {
        case QuoteKind::Zciis:
            for (const auto& q : file.zciis)
                out << format_double(q.maturity) << "," << format_double_scaled(q.rate, 2) << "\n";
            break;
        case QuoteKind::Cap:
            for (const auto& q : file.caps)
                out << format_double(q.maturity) << "," << format_double_scaled(q.strike, 2)
                    << "," << format_double_scaled(q.price, 4) << "\n";
            break;
        case QuoteKind::NominalCurve:
            for (const auto& p : file.curve)
                out << format_double(p.maturity) << "," << format_double(p.value) << "\n";
            break;
        case QuoteKind::CpiFixings:
            for (const auto& f : file.fixings)
                out << format_double(f.offset) << "," << format_double(f.level) << "\n";
            break;
        case QuoteKind::InstrumentBook:
            for (const auto& b : file.book)
                out << b.id << "," << Instrument::kind_name(b.kind) << ","
                    << format_double(b.start) << "," << format_double(b.end) << ","
                    << format_double(b.freq) << "," << format_double_scaled(b.strike, 2) << ","
                    << format_double(b.notional) << "\n";
            break;
    }
    return out.str();
}

void write_quotes(const QuoteFile& file, const std::string& path) {
    write_text_file(path, format_quotes(file));
}

bool operator==(const QuoteFile& a, const QuoteFile& b) {
    if (a.kind != b.kind) return false;
    auto eq = [](double x, double y) { return x == y; };
    switch (a.kind) {
        case QuoteKind::Zciis:
            if (a.zciis.size() != b.zciis.size()) return false;
            for (std::size_t i = 0; i < a.zciis.size(); ++i)
                if (!eq(a.zciis[i].maturity, b.zciis[i].maturity) ||
                    !eq(a.zciis[i].rate, b.zciis[i].rate))
                    return false;
            return true;
        case QuoteKind::Cap:
            if (a.caps.size() != b.caps.size()) return false;
            for (std::size_t i = 0; i < a.caps.size(); ++i)
                if (!eq(a.caps[i].maturity, b.caps[i].maturity) ||
                    !eq(a.caps[i].strike, b.caps[i].strike) ||
                    !eq(a.caps[i].price, b.caps[i].price))
                    return false;
            return true;
        case QuoteKind::NominalCurve:
            if (a.curve.size() != b.curve.size()) return false;
            for (std::size_t i = 0; i < a.curve.size(); ++i)
                if (!eq(a.curve[i].maturity, b.curve[i].maturity) ||
                    !eq(a.curve[i].value, b.curve[i].value))
                    return false;
            return true;
        case QuoteKind::CpiFixings:
            if (a.fixings.size() != b.fixings.size()) return false;
            for (std::size_t i = 0; i < a.fixings.size(); ++i)
                if (!eq(a.fixings[i].offset, b.fixings[i].offset) ||
                    !eq(a.fixings[i].level, b.fixings[i].level))
                    return false;
            return true;
        case QuoteKind::InstrumentBook:
            if (a.book.size() != b.book.size()) return false;
            for (std::size_t i = 0; i < a.book.size(); ++i) {
                const auto& x = a.book[i];
                const auto& y = b.book[i];
                if (x.id != y.id || x.kind != y.kind || !eq(x.start, y.start) ||
                    !eq(x.end, y.end) || !eq(x.freq, y.freq) || !eq(x.strike, y.strike) ||
                    !eq(x.notional, y.notional))
                    return false;
            }
            return true;
    }
    return false;
}

std::string price_report_csv(const std::vector<PriceRecord>& records) {
    std::ostringstream out;
    out << "id,kind,status,pv,pv_per_notional,vol_used,error\n";
    for (const auto& r : records) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out << r.id << "," << r.kind << "," << (r.ok ? "ok" : "error") << ","
            << format_double(r.value) << "," << format_double(r.per_notional) << ","
            << format_double(r.vol_used) << "," << err << "\n";
    }
    return out.str();
}

std::vector<PriceRecord> parse_price_report_csv(std::string_view text) {
    std::vector<PriceRecord> out;
    std::size_t start = 0;
    std::vector<std::string> lines;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            lines.emplace_back(trim(text.substr(start, i - start)));
            start = i + 1;
        }
    }
    if (lines.empty() || lines[0] != "id,kind,status,pv,pv_per_notional,vol_used,error")
        throw InputError("price report: bad header");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cols = split_csv(lines[i]);
        if (cols.size() != 7) throw InputError("price report: bad row");
        PriceRecord r;
        r.id = cols[0];
        r.kind = cols[1];
        r.ok = cols[2] == "ok";
        r.value = parse_double(cols[3]);
        r.per_notional = parse_double(cols[4]);
        r.vol_used = parse_double(cols[5]);
        r.error = cols[6];
        out.push_back(std::move(r));
    }
    return out;
}

std::string calibration_result_json(const CalibrationResult& result, const TenorGrid& grid) {
    nlohmann::json j;
    j["grid_dates"] = grid.dates();
    j["inflation_vols"] = result.inflation_vols;
    j["rho"] = result.rho;
    j["residuals"] = result.residuals;
    j["residuals_relative"] = result.residuals_relative;
    j["objective"] = result.objective;
    j["converged"] = result.converged;
    j["message"] = result.message;
    nlohmann::json iters = nlohmann::json::array();
    for (const auto& it : result.iterations) {
        iters.push_back({{"outer", it.outer},
                         {"inner", it.inner},
                         {"merit", it.merit},
                         {"objective", it.objective},
                         {"max_violation", it.max_violation}});
    }
    j["iterations"] = iters;
    return j.dump(2);
}

SurfaceData surface_from_json(std::string_view json_text) {
    const auto j = nlohmann::json::parse(json_text);
    SurfaceData s;
    s.grid_dates = j.at("grid_dates").get<std::vector<double>>();
    s.inflation_vols = j.at("inflation_vols").get<std::vector<std::vector<double>>>();
    s.rho = j.at("rho").get<std::vector<double>>();
    return s;
}

std::string vol_matrix_csv(const CalibrationResult& result, const TenorGrid& grid) {
    std::ostringstream out;
    out << "maturity_years";
    for (std::size_t i = 1; i <= grid.periods(); ++i)
        out << ",t_" << format_double(grid.date(i - 1)) << "_to_" << format_double(grid.date(i));
    out << "\n";
    for (std::size_t j = 1; j <= result.inflation_vols.size(); ++j) {
        out << format_double(grid.date(j));
        for (std::size_t i = 1; i <= grid.periods(); ++i) {
            out << ",";
            if (i <= result.inflation_vols[j - 1].size())
                out << format_double(result.inflation_vols[j - 1][i - 1]);
            else
                out << format_double(0.0);
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace ilmm
