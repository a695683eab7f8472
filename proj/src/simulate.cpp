#include "ilmm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "ilmm/errors.hpp"
#include "ilmm/rng.hpp"

namespace ilmm {

double PathState::discount_to(std::size_t i) const {
    double p = 1.0;
    for (std::size_t k = horizon_; k < i; ++k)
        p /= 1.0 + grid_->accrual(k + 1) * f_[k];
    return p;
}

double PathState::money_market() const {
    double b = 1.0;
    for (std::size_t k = 0; k < horizon_; ++k) b *= 1.0 + grid_->accrual(k + 1) * f_[k];
    return b;
}

double PathState::annuity(std::size_t m, std::size_t n) const {
    double a = 0.0;
    double p = discount_to(m);
    for (std::size_t i = m + 1; i <= n; ++i) {
        p /= 1.0 + grid_->accrual(i) * f_[i - 1];
        a += grid_->accrual(i) * p;
    }
    return a;
}

double PathState::displaced_swap_rate(std::size_t m, std::size_t n) const {
    double a = 0.0, s = 0.0;
    double p = discount_to(m);
    for (std::size_t i = m + 1; i <= n; ++i) {
        p /= 1.0 + grid_->accrual(i) * f_[i - 1];
        const double w = grid_->accrual(i) * p;
        a += w;
        s += w * mu_[i - 1];
    }
    return s / a;
}

double PathState::swap_rate(std::size_t m, std::size_t n) const {
    double a = 0.0, s = 0.0;
    double p = discount_to(m);
    for (std::size_t i = m + 1; i <= n; ++i) {
        p /= 1.0 + grid_->accrual(i) * f_[i - 1];
        const double w = grid_->accrual(i) * p;
        a += w;
        s += w * (mu_[i - 1] - 1.0 / grid_->accrual(i));
    }
    return s / a;
}

std::string PathSet::var_name(std::size_t var) const {
    const std::size_t n = grid.periods();
    if (var < n) return "f_" + std::to_string(var);
    if (var < 2 * n) return "mu_" + std::to_string(var - n + 1);
    return "B";
}

namespace {

struct Step {
    double t0, h, sqrth;
    std::size_t interval;    // calendar interval index (eta_t for t in [t0, t0+h))
    std::uint32_t index;     // global step index for the RNG
};

struct Schedule {
    std::vector<Step> steps;
    std::vector<double> times;  // boundaries, size steps+1
};

Schedule build_schedule(const TenorGrid& grid, std::size_t horizon, int steps_per_year) {
    Schedule s;
    s.times.push_back(grid.front());
    std::uint32_t idx = 0;
    for (std::size_t i = 1; i <= horizon; ++i) {
        const double a = grid.accrual(i);
        const int m = std::max(1, static_cast<int>(std::ceil(a * steps_per_year - 1e-9)));
        const double h = a / m;
        for (int q = 0; q < m; ++q) {
            s.steps.push_back({grid.date(i - 1) + q * h, h, std::sqrt(h), i, idx++});
            s.times.push_back(grid.date(i - 1) + (q + 1) * h);
        }
    }
    return s;
}

struct EngineContext {
    const JointModel* model;
    const McConfig* cfg;
    Schedule schedule;
    std::int64_t n_pairs;
    int paths_per_pair;  // 2 when antithetic, else 1
    double numeraire0;   // N(0)
};

// Per-thread scratch. Reused across paths; never shared.
struct Workspace {
    std::vector<double> f, mu, w, sig, sign, z, p;
    explicit Workspace(std::size_t n, int d)
        : f(n), mu(n), w(n), sig((n + 1) * static_cast<std::size_t>(d)), sign(d), z(d), p(n + 1) {}
};

void draw_normals(std::uint64_t seed, std::uint64_t pair, std::uint32_t step, int d,
                  double anti, double* z) {
    for (int c = 0; c < d; c += 2) {
        double z0, z1;
        normal_pair(seed, pair, step, static_cast<std::uint32_t>(c / 2), z0, z1);
        z[c] = anti * z0;
        if (c + 1 < d) z[c + 1] = anti * z1;
    }
}

// Evolves one path to the horizon; f/mu in ws hold the terminal state.
void run_path(const EngineContext& ctx, std::uint64_t pair, double anti, Workspace& ws,
              PathSet* record, std::int64_t path_index) {
    const JointModel& model = *ctx.model;
    const TenorGrid& grid = model.grid();
    const VolSurface& vols = model.vols();
    const std::size_t n = grid.periods();
    const int d = model.factors();
    const McConfig& cfg = *ctx.cfg;

    std::copy(model.nominal_forwards().begin(), model.nominal_forwards().end(), ws.f.begin());
    std::copy(model.displaced_inflations().begin(), model.displaced_inflations().end(),
              ws.mu.begin());

    auto record_row = [&](std::size_t time_idx, double t) {
        if (!record) return;
        double* row = record->values.data() +
                      (static_cast<std::size_t>(path_index) * record->times.size() + time_idx) *
                          record->n_vars;
        std::memcpy(row, ws.f.data(), n * sizeof(double));
        std::memcpy(row + n, ws.mu.data(), n * sizeof(double));
        // discretely compounded money market, accrued linearly inside the period
        double b = 1.0;
        std::size_t i = 1;
        while (i <= n && grid.date(i) <= t + 1e-12) {
            b *= 1.0 + grid.accrual(i) * ws.f[i - 1];
            ++i;
        }
        if (i <= n && t > grid.date(i - 1))
            b *= 1.0 + ws.f[i - 1] * (t - grid.date(i - 1));
        row[2 * n] = b;
    };

    record_row(0, grid.front());

    std::size_t time_idx = 1;
    for (const Step& st : ctx.schedule.steps) {
        const std::size_t itv = st.interval;

        // drift weights and bond vols Sigma_M for M = itv..n at the step start
        for (std::size_t k = itv; k < n; ++k) {
            const double af = grid.accrual(k + 1) * ws.f[k];
            ws.w[k] = af / (1.0 + af);
        }
        double* sig = ws.sig.data();
        for (int c = 0; c < d; ++c) sig[itv * d + c] = 0.0;
        for (std::size_t m = itv + 1; m <= n; ++m) {
            const double* g = vols.nominal_loading(m - 1, itv);
            for (int c = 0; c < d; ++c)
                sig[m * d + c] = sig[(m - 1) * d + c] - ws.w[m - 1] * g[c];
        }

        // numeraire volatility
        double* sn = ws.sign.data();
        switch (cfg.measure) {
            case Measure::Spot:
                for (int c = 0; c < d; ++c) sn[c] = 0.0;
                break;
            case Measure::Forward:
                for (int c = 0; c < d; ++c) sn[c] = sig[cfg.forward_index * d + c];
                break;
            case Measure::Annuity: {
                // omega_l(t) from current bonds; the front bond P(t, T_itv) cancels
                double p = 1.0, annuity = 0.0;
                for (std::size_t l = itv; l <= cfg.swap_end; ++l) {
                    if (l > itv) p /= 1.0 + grid.accrual(l) * ws.f[l - 1];
                    if (l > cfg.swap_start) {
                        ws.p[l] = grid.accrual(l) * p;
                        annuity += ws.p[l];
                    }
                }
                for (int c = 0; c < d; ++c) sn[c] = 0.0;
                for (std::size_t l = cfg.swap_start + 1; l <= cfg.swap_end; ++l) {
                    const double wgt = ws.p[l] / annuity;
                    for (int c = 0; c < d; ++c) sn[c] += wgt * sig[l * d + c];
                }
                break;
            }
        }

        draw_normals(cfg.seed, pair, st.index, d, anti, ws.z.data());

        for (std::size_t k = itv; k < n; ++k) {
            const double* g = vols.nominal_loading(k, itv);
            double drift = 0.0, n2 = 0.0, shock = 0.0;
            for (int c = 0; c < d; ++c) {
                drift += g[c] * (sn[c] - sig[(k + 1) * d + c]);
                n2 += g[c] * g[c];
                shock += g[c] * ws.z[c];
            }
            ws.f[k] *= std::exp((drift - 0.5 * n2) * st.h + st.sqrth * shock);
        }
        for (std::size_t j = std::max<std::size_t>(itv, 1); j <= n; ++j) {
            const double* g = vols.inflation_loading(j, itv);
            double drift = 0.0, n2 = 0.0, shock = 0.0;
            for (int c = 0; c < d; ++c) {
                drift += g[c] * (sn[c] - sig[j * d + c]);
                n2 += g[c] * g[c];
                shock += g[c] * ws.z[c];
            }
            ws.mu[j - 1] *= std::exp((drift - 0.5 * n2) * st.h + st.sqrth * shock);
        }

        record_row(time_idx, st.t0 + st.h);
        ++time_idx;
    }
}

EngineContext make_context(const JointModel& model, const McConfig& cfg) {
    const TenorGrid& grid = model.grid();
    const std::size_t n = grid.periods();
    if (grid.front() != 0.0) throw ModelError("simulation requires a grid anchored at T_0 = 0");
    if (cfg.horizon_index < 1 || cfg.horizon_index > n)
        throw ModelError("simulation horizon index out of grid");
    if (cfg.paths < 1) throw ModelError("simulation needs at least one path");
    if (cfg.steps_per_year < 1) throw ModelError("steps_per_year must be positive");
    if (cfg.antithetic && cfg.paths % 2 != 0)
        throw ModelError("antithetic simulation needs an even path count");

    EngineContext ctx;
    ctx.model = &model;
    ctx.cfg = &cfg;
    ctx.schedule = build_schedule(grid, cfg.horizon_index, cfg.steps_per_year);
    ctx.paths_per_pair = cfg.antithetic ? 2 : 1;
    ctx.n_pairs = cfg.paths / ctx.paths_per_pair;

    switch (cfg.measure) {
        case Measure::Spot:
            ctx.numeraire0 = 1.0;
            break;
        case Measure::Forward: {
            if (cfg.forward_index < cfg.horizon_index || cfg.forward_index > n)
                throw ModelError("forward measure index must satisfy h <= M <= N");
            double p = 1.0;
            for (std::size_t k = 0; k < cfg.forward_index; ++k)
                p /= 1.0 + grid.accrual(k + 1) * model.nominal_forward(k);
            ctx.numeraire0 = p;
            break;
        }
        case Measure::Annuity: {
            if (!(cfg.swap_start < cfg.swap_end) || cfg.swap_end > n ||
                cfg.horizon_index > cfg.swap_start)
                throw ModelError("annuity measure requires h <= m < n <= N");
            double p = 1.0, a = 0.0;
            for (std::size_t i = 1; i <= cfg.swap_end; ++i) {
                p /= 1.0 + grid.accrual(i) * model.nominal_forward(i - 1);
                if (i > cfg.swap_start) a += grid.accrual(i) * p;
            }
            ctx.numeraire0 = a;
            break;
        }
    }
    return ctx;
}

double path_numeraire(const EngineContext& ctx, const PathState& state) {
    switch (ctx.cfg->measure) {
        case Measure::Spot:
            return state.money_market();
        case Measure::Forward:
            return state.discount_to(ctx.cfg->forward_index);
        case Measure::Annuity:
            return state.annuity(ctx.cfg->swap_start, ctx.cfg->swap_end);
    }
    return 1.0;
}

}  // namespace

std::vector<McEstimate> mc_value(const JointModel& model, const McConfig& cfg,
                                 const std::vector<Payoff>& payoffs, ExecutionMode mode) {
    if (payoffs.empty()) throw ModelError("mc_value: no payoffs");
    EngineContext ctx = make_context(model, cfg);
    const std::size_t n = model.periods();
    const std::size_t np = payoffs.size();
    const std::int64_t pairs = ctx.n_pairs;

    // one slot per (payoff, pair); reduced serially in pair order afterwards
    std::vector<double> slots(np * static_cast<std::size_t>(pairs));

    auto run_pair = [&](std::int64_t q, Workspace& ws) {
        double acc[64];  // np is small in practice
        for (std::size_t ip = 0; ip < np; ++ip) acc[ip] = 0.0;
        for (int leg = 0; leg < ctx.paths_per_pair; ++leg) {
            run_path(ctx, static_cast<std::uint64_t>(q), leg == 0 ? 1.0 : -1.0, ws, nullptr, 0);
            PathState state(model.grid(), ws.f, ws.mu, cfg.horizon_index);
            const double nume = path_numeraire(ctx, state);
            for (std::size_t ip = 0; ip < np; ++ip) {
                const double x = payoffs[ip].fn(state);
                acc[ip] += payoffs[ip].discounted ? ctx.numeraire0 * x / nume : x;
            }
        }
        for (std::size_t ip = 0; ip < np; ++ip)
            slots[ip * static_cast<std::size_t>(pairs) + static_cast<std::size_t>(q)] =
                acc[ip] / ctx.paths_per_pair;
    };

    if (np > 64) throw ModelError("mc_value: too many payoffs in one batch");

    if (mode == ExecutionMode::Serial) {
        Workspace ws(n, model.factors());
        for (std::int64_t q = 0; q < pairs; ++q) run_pair(q, ws);
    } else {
#pragma omp parallel
        {
            Workspace ws(n, model.factors());
#pragma omp for schedule(static)
            for (std::int64_t q = 0; q < pairs; ++q) run_pair(q, ws);
        }
    }

    std::vector<McEstimate> out(np);
    for (std::size_t ip = 0; ip < np; ++ip) {
        const double* v = slots.data() + ip * static_cast<std::size_t>(pairs);
        double mean = 0.0;
        for (std::int64_t q = 0; q < pairs; ++q) mean += v[q];
        mean /= static_cast<double>(pairs);
        double var = 0.0;
        for (std::int64_t q = 0; q < pairs; ++q) {
            const double dvi = v[q] - mean;
            var += dvi * dvi;
        }
        const double se =
            pairs > 1 ? std::sqrt(var / (static_cast<double>(pairs) * (pairs - 1))) : 0.0;
        out[ip] = {payoffs[ip].name, mean, se, pairs};
    }
    return out;
}

PathSet simulate(const JointModel& model, const McConfig& cfg, ExecutionMode mode) {
    EngineContext ctx = make_context(model, cfg);
    const std::size_t n = model.periods();

    PathSet ps;
    ps.measure = cfg.measure;
    ps.seed = cfg.seed;
    ps.paths = cfg.paths;
    ps.steps_per_year = cfg.steps_per_year;
    ps.antithetic = cfg.antithetic;
    ps.grid = model.grid();
    ps.times = ctx.schedule.times;
    ps.n_vars = 2 * n + 1;

    const std::size_t total =
        static_cast<std::size_t>(cfg.paths) * ps.times.size() * ps.n_vars;
    if (total > (std::size_t{1} << 27))
        throw ModelError("path set too large to record; use mc_value for production runs");
    ps.values.assign(total, 0.0);

    auto run_one = [&](std::int64_t path, Workspace& ws) {
        const std::int64_t q = cfg.antithetic ? path / 2 : path;
        const double anti = (cfg.antithetic && path % 2 == 1) ? -1.0 : 1.0;
        run_path(ctx, static_cast<std::uint64_t>(q), anti, ws, &ps, path);
        for (std::size_t k = 0; k < n; ++k)
            if (!(ws.f[k] > 0.0) || !(ws.mu[k] > 0.0))
                throw ModelError("positivity violated on simulated path");
    };

    if (mode == ExecutionMode::Serial) {
        Workspace ws(n, model.factors());
        for (std::int64_t p = 0; p < cfg.paths; ++p) run_one(p, ws);
    } else {
#pragma omp parallel
        {
            Workspace ws(n, model.factors());
#pragma omp for schedule(static)
            for (std::int64_t p = 0; p < cfg.paths; ++p) run_one(p, ws);
        }
    }
    return ps;
}

}  // namespace ilmm
