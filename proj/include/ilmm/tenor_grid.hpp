#pragma once

#include <cstddef>
#include <vector>

namespace ilmm {

/// Payment/fixing schedule T_0 < T_1 < ... < T_N with accruals dT_i = T_i - T_{i-1}.
///
/// Dates are year-fraction offsets from the valuation date. T_0 = 0 for a
/// fresh schedule; a seasoned grid (T_0 != 0, typically negative) must be
/// declared explicitly.
class TenorGrid {
public:
    TenorGrid() = default;
    explicit TenorGrid(std::vector<double> dates, bool seasoned = false);

    /// Annual grid 0, 1, ..., n_years.
    static TenorGrid annual(int n_years);

    std::size_t size() const { return dates_.size(); }          // N + 1 points
    std::size_t periods() const { return dates_.size() - 1; }   // N

    double date(std::size_t i) const { return dates_[i]; }
    /// dT_i = T_i - T_{i-1}, valid for i in [1, N].
    double accrual(std::size_t i) const { return dates_[i] - dates_[i - 1]; }
    double front() const { return dates_.front(); }
    double back() const { return dates_.back(); }
    const std::vector<double>& dates() const { return dates_; }

    bool seasoned() const { return seasoned_; }

    /// Smallest index i with T_i > t (eta_t in the usual market-model notation);
    /// returns N+1 when t >= T_N.
    std::size_t next_index(double t) const;

    /// Index i with T_i == t (within 1e-12), or throws CurveError.
    std::size_t index_of(double t) const;

private:
    std::vector<double> dates_;
    bool seasoned_ = false;
};

}  // namespace ilmm
