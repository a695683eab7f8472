#include "ilmm/tenor_grid.hpp"

#include <algorithm>
#include <cmath>

#include "ilmm/errors.hpp"

namespace ilmm {

TenorGrid::TenorGrid(std::vector<double> dates, bool seasoned)
    : dates_(std::move(dates)), seasoned_(seasoned) {
    if (dates_.size() < 2) throw CurveError("tenor grid needs at least two dates");
    for (std::size_t i = 1; i < dates_.size(); ++i) {
        if (!(dates_[i] > dates_[i - 1]))
            throw CurveError("tenor grid dates must be strictly increasing");
    }
    if (!seasoned_ && dates_.front() != 0.0)
        throw CurveError("tenor grid must start at the valuation date (T_0 = 0); "
                         "declare the grid seasoned to override");
}

TenorGrid TenorGrid::annual(int n_years) {
    std::vector<double> d(static_cast<std::size_t>(n_years) + 1);
    for (int i = 0; i <= n_years; ++i) d[static_cast<std::size_t>(i)] = i;
    return TenorGrid(std::move(d));
}

std::size_t TenorGrid::next_index(double t) const {
    auto it = std::upper_bound(dates_.begin(), dates_.end(), t);
    return static_cast<std::size_t>(it - dates_.begin());
}

std::size_t TenorGrid::index_of(double t) const {
    for (std::size_t i = 0; i < dates_.size(); ++i)
        if (std::abs(dates_[i] - t) < 1e-12) return i;
    throw CurveError("date " + std::to_string(t) + " is not on the tenor grid");
}

}  // namespace ilmm
