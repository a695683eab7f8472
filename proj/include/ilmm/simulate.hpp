#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ilmm/joint_model.hpp"

namespace ilmm {

enum class Measure { Spot, Forward, Annuity };

/// Serial is the reference implementation; OpenMP must produce bitwise
/// identical results (counter-based RNG, fixed-order reduction).
enum class ExecutionMode { Serial, OpenMP };

struct McConfig {
    Measure measure = Measure::Spot;
    std::size_t forward_index = 0;  // M in Q_{T_M}
    std::size_t swap_start = 0;     // m in Q_{m,n}
    std::size_t swap_end = 0;       // n in Q_{m,n}
    std::size_t horizon_index = 0;  // simulate up to T_h (grid index), required
    std::int64_t paths = 100000;
    int steps_per_year = 4;
    std::uint64_t seed = 1;
    bool antithetic = true;
};

/// Snapshot of one path at its horizon T_h. Rates that fixed before T_h hold
/// their fixing values, so the vector contains every fixing needed to value
/// path-dependent payoffs at T_h.
class PathState {
public:
    PathState(const TenorGrid& grid, std::span<const double> f, std::span<const double> mu,
              std::size_t horizon)
        : grid_(&grid), f_(f), mu_(mu), horizon_(horizon) {}

    const TenorGrid& grid() const { return *grid_; }
    std::size_t horizon() const { return horizon_; }
    /// Nominal forward f_k at min(T_h, T_k) (its fixing once k < h).
    double f(std::size_t k) const { return f_[k]; }
    /// Displaced inflation forward mu_j at min(T_h, T_j).
    double mu(std::size_t j) const { return mu_[j - 1]; }

    /// P(T_h, T_i) reconstructed from the surviving forwards, i >= h.
    double discount_to(std::size_t i) const;
    /// Discretely compounded money-market account B(T_h) from realized fixings.
    double money_market() const;
    /// A_{m,n}(T_h) = sum dT_i P(T_h, T_i), requires h <= m.
    double annuity(std::size_t m, std::size_t n) const;
    /// S_{m,n}(T_h) + 1/dT_{m,n}(T_h) = sum omega_i mu_i.
    double displaced_swap_rate(std::size_t m, std::size_t n) const;
    double swap_rate(std::size_t m, std::size_t n) const;

private:
    const TenorGrid* grid_;
    std::span<const double> f_;
    std::span<const double> mu_;
    std::size_t horizon_;
};

struct Payoff {
    std::string name;
    std::function<double(const PathState&)> fn;
    /// true: price = N(0) E[fn/N(T_h)] under the configured numeraire;
    /// false: plain expectation of fn under the simulated measure.
    bool discounted = true;
};

struct McEstimate {
    std::string name;
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;  // independent samples (antithetic pairs count once)
};

/// Log-Euler scheme on ln f and ln mu with measure-consistent drifts,
/// antithetic pairing, and deterministic chunk merging.
std::vector<McEstimate> mc_value(const JointModel& model, const McConfig& cfg,
                                 const std::vector<Payoff>& payoffs,
                                 ExecutionMode mode = ExecutionMode::OpenMP);

/// Full path recording for debugging and reproducibility checks. Memory is
/// capped; use mc_value for production path counts.
struct PathSet {
    Measure measure;
    std::uint64_t seed = 0;
    std::int64_t paths = 0;
    int steps_per_year = 0;
    bool antithetic = true;
    TenorGrid grid;
    std::vector<double> times;       // step boundaries, times[0] = 0
    std::size_t n_vars = 0;          // f_0..f_{N-1}, mu_1..mu_N, B
    std::vector<double> values;      // [path][time][var]

    double value(std::int64_t path, std::size_t time_idx, std::size_t var) const {
        return values[(static_cast<std::size_t>(path) * times.size() + time_idx) * n_vars + var];
    }
    std::string var_name(std::size_t var) const;
};

PathSet simulate(const JointModel& model, const McConfig& cfg,
                 ExecutionMode mode = ExecutionMode::OpenMP);

}  // namespace ilmm
