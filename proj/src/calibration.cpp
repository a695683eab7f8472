#include "ilmm/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ilmm/errors.hpp"
#include "ilmm/joint_model.hpp"
#include "ilmm/pricing.hpp"

namespace ilmm {

CalibrationTarget CalibrationTarget::caplet_vol(std::size_t j, double sigma, double w) {
    CalibrationTarget t;
    t.kind = Kind::CapletVol;
    t.index = j;
    t.value = sigma;
    t.weight = w;
    return t;
}

CalibrationTarget CalibrationTarget::cap_price(std::size_t n, double strike, double price,
                                               double w) {
    CalibrationTarget t;
    t.kind = Kind::CapPrice;
    t.index = n;
    t.strike = strike;
    t.value = price;
    t.weight = w;
    return t;
}

CalibrationTarget CalibrationTarget::swaption_vol(std::size_t m, std::size_t n, double sigma,
                                                  double w) {
    CalibrationTarget t;
    t.kind = Kind::SwaptionVol;
    t.m = m;
    t.n = n;
    t.value = sigma;
    t.weight = w;
    return t;
}

BootstrapResult bootstrap_caplet_vols(const NominalCurve& nominal,
                                      const InflationCurve& inflation, const TenorGrid& grid,
                                      const std::vector<CapQuote>& quotes) {
    if (quotes.empty()) throw ModelError("bootstrap: no cap quotes");
    const double strike = quotes.front().strike;
    for (const auto& q : quotes) {
        if (q.strike != strike)
            throw ModelError("bootstrap requires quotes at a single strike");
        if (!(q.price > 0.0) || !std::isfinite(q.price))
            throw ModelError("bootstrap: cap prices must be positive and finite");
    }

    BootstrapResult out;
    const std::size_t n_last = grid.index_of(quotes.back().maturity);
    out.caplet_vols.assign(n_last, 0.0);

    // per-caplet discounted intrinsic and upper bounds
    std::vector<double> scale(n_last + 1, 0.0), mu(n_last + 1, 0.0), ktil(n_last + 1, 0.0);
    for (std::size_t j = 1; j <= n_last; ++j) {
        const double a = grid.accrual(j);
        scale[j] = a * nominal.discount(grid.date(j));
        mu[j] = inflation_forward(inflation, grid.date(j - 1), grid.date(j)) + 1.0 / a;
        ktil[j] = strike + 1.0 / a;
        if (!(ktil[j] > 0.0)) throw ModelError("bootstrap: displaced strike must be positive");
    }

    double prev_price = 0.0;
    double prev_mat = 0.0;
    std::size_t lo = 1;
    for (const auto& q : quotes) {
        const std::size_t hi = grid.index_of(q.maturity);
        if (hi < lo) throw ModelError("bootstrap: quote maturities must be increasing");
        const double strip_price = q.price - prev_price;
        std::ostringstream pair_name;
        pair_name << "maturities " << prev_mat << "y and " << q.maturity << "y";
        if (strip_price < -1e-14)
            throw ArbitrageError("calendar arbitrage in cap quotes between " + pair_name.str() +
                                 ": longer cap is cheaper");
        double intrinsic = 0.0, upper = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) {
            intrinsic += scale[j] * std::max(mu[j] - ktil[j], 0.0);
            upper += scale[j] * mu[j];
        }
        if (strip_price < intrinsic - 1e-14)
            throw ArbitrageError("cap strip between " + pair_name.str() + " priced at " +
                                 std::to_string(strip_price) + " below its intrinsic value " +
                                 std::to_string(intrinsic));
        if (strip_price > upper + 1e-14)
            throw ArbitrageError("cap strip between " + pair_name.str() +
                                 " priced above its displaced-forward bound");

        auto strip_value = [&](double sigma) {
            double v = 0.0;
            for (std::size_t j = lo; j <= hi; ++j)
                v += scale[j] * black_call(mu[j], ktil[j], sigma * std::sqrt(grid.date(j)));
            return v - strip_price;
        };
        double sig_lo = 0.0, sig_hi = 0.05;
        while (strip_value(sig_hi) < 0.0) {
            sig_hi *= 2.0;
            if (sig_hi > 64.0)
                throw ArbitrageError("cap strip between " + pair_name.str() +
                                     " cannot be matched by any finite volatility");
        }
        for (int it = 0; it < 120; ++it) {
            const double mid = 0.5 * (sig_lo + sig_hi);
            if (strip_value(mid) < 0.0)
                sig_lo = mid;
            else
                sig_hi = mid;
        }
        const double sigma = 0.5 * (sig_lo + sig_hi);
        for (std::size_t j = lo; j <= hi; ++j) out.caplet_vols[j - 1] = sigma;
        out.strips.emplace_back(lo, hi);
        lo = hi + 1;
        prev_price = q.price;
        prev_mat = q.maturity;
    }
    return out;
}

namespace {

/// Assembled QCQP: x = [g slots..., rho slots...], every constraint quadratic.
struct Problem {
    const TenorGrid* grid;
    std::size_t n_use = 0;   // highest maturity index carrying an unknown
    bool time_homog = true;
    std::vector<std::size_t> g_offset;  // per maturity j (1-based): slot of (j, i=1)
    std::size_t n_g = 0;
    bool solve_rho = false;
    std::size_t n_rho = 0;  // piecewise rho unknowns
    double rho_fixed = 0.0;
    double alpha = 1.0, beta = 1.0;
    double g_max = 5.0;

    // swaption precomputations, one entry per swaption target
    struct SwaptionData {
        std::size_t m, n;
        double t_m;
        std::vector<double> a;      // accrual per interval 1..m (index i-1)
        std::vector<double> b;      // B_i per interval
        std::vector<double> alpha_w;  // alpha_l (index l-m-1)
    };

    struct Constraint {
        CalibrationTarget target;
        int swaption_slot = -1;  // into swaptions, or -1 for caplet targets
    };

    std::vector<Constraint> constraints;
    std::vector<SwaptionData> swaptions;

    std::size_t g_slot(std::size_t j, std::size_t interval) const {
        return time_homog ? j - 1 : g_offset[j - 1] + (interval - 1);
    }
    std::size_t rho_slot(std::size_t interval) const {
        return n_g + std::min(interval, n_rho) - 1;
    }
    double rho_at(const Eigen::VectorXd& x, std::size_t interval) const {
        return solve_rho ? x[static_cast<Eigen::Index>(rho_slot(interval))] : rho_fixed;
    }
    std::size_t dim() const { return n_g + (solve_rho ? n_rho : 0); }

    // relative constraint value with optional gradient/Hessian accumulation
    double constraint_value(std::size_t t, const Eigen::VectorXd& x, Eigen::VectorXd* grad,
                            Eigen::MatrixXd* hess, double gscale) const {
        const Constraint& cn = constraints[t];
        const CalibrationTarget& tg = cn.target;
        const double sigma2 = tg.value * tg.value;
        if (tg.kind == CalibrationTarget::Kind::CapletVol) {
            const std::size_t j = tg.index;
            const double tj = grid->date(j);
            double integral = 0.0;
            for (std::size_t i = 1; i <= j; ++i) {
                const double a = grid->accrual(i);
                const double g = x[static_cast<Eigen::Index>(g_slot(j, i))];
                integral += a * g * g;
            }
            const double denom = sigma2 * tj;
            const double c = integral / denom - 1.0;
            if (grad) {
                for (std::size_t i = 1; i <= j; ++i) {
                    const double a = grid->accrual(i);
                    const auto s = static_cast<Eigen::Index>(g_slot(j, i));
                    const double g = x[s];
                    (*grad)[s] += gscale * 2.0 * a * g / denom;
                    if (hess) (*hess)(s, s) += gscale * 2.0 * a / denom;
                }
            }
            return c;
        }
        // swaption
        const SwaptionData& sd = swaptions[static_cast<std::size_t>(cn.swaption_slot)];
        const double denom = sigma2 * sd.t_m;
        double integral = 0.0;
        for (std::size_t i = 1; i <= sd.m; ++i) {
            double av = 0.0;
            for (std::size_t l = sd.m + 1; l <= sd.n; ++l)
                av += sd.alpha_w[l - sd.m - 1] * x[static_cast<Eigen::Index>(g_slot(l, i))];
            const double r = rho_at(x, i);
            const double b = sd.b[i - 1];
            integral += sd.a[i - 1] * (av * av + 2.0 * r * av * b + b * b);
            if (grad) {
                const double common = sd.a[i - 1] * (2.0 * av + 2.0 * r * b) / denom;
                for (std::size_t l = sd.m + 1; l <= sd.n; ++l) {
                    const auto s = static_cast<Eigen::Index>(g_slot(l, i));
                    const double al = sd.alpha_w[l - sd.m - 1];
                    (*grad)[s] += gscale * common * al;
                }
                if (solve_rho) {
                    const auto rs = static_cast<Eigen::Index>(rho_slot(i));
                    (*grad)[rs] += gscale * sd.a[i - 1] * 2.0 * av * b / denom;
                }
                if (hess) {
                    for (std::size_t l = sd.m + 1; l <= sd.n; ++l) {
                        const auto s1 = static_cast<Eigen::Index>(g_slot(l, i));
                        const double al = sd.alpha_w[l - sd.m - 1];
                        for (std::size_t l2 = sd.m + 1; l2 <= sd.n; ++l2) {
                            const auto s2 = static_cast<Eigen::Index>(g_slot(l2, i));
                            const double al2 = sd.alpha_w[l2 - sd.m - 1];
                            (*hess)(s1, s2) += gscale * sd.a[i - 1] * 2.0 * al * al2 / denom;
                        }
                        if (solve_rho) {
                            const auto rs = static_cast<Eigen::Index>(rho_slot(i));
                            const double cr = gscale * sd.a[i - 1] * 2.0 * al * b / denom;
                            (*hess)(s1, rs) += cr;
                            (*hess)(rs, s1) += cr;
                        }
                    }
                }
            }
        }
        return integral / denom - 1.0;
    }

    /// model-integral minus sigma^2 (T - 0), the constraint equation
    /// left-minus-right (absolute units)
    double absolute_residual(std::size_t t, const Eigen::VectorXd& x) const {
        const CalibrationTarget& tg = constraints[t].target;
        const double sigma2 = tg.value * tg.value;
        const double horizon = tg.kind == CalibrationTarget::Kind::CapletVol
                                   ? grid->date(tg.index)
                                   : grid->date(tg.m);
        return constraint_value(t, x, nullptr, nullptr, 0.0) * sigma2 * horizon;
    }

    double objective(const Eigen::VectorXd& x, Eigen::VectorXd* grad,
                     Eigen::MatrixXd* hess) const {
        double obj = 0.0;
        // adjacent-maturity smoothness, time-sliced over shared intervals
        for (std::size_t j = 2; j <= n_use; ++j) {
            const std::size_t shared = time_homog ? 1 : j - 1;
            for (std::size_t i = 1; i <= shared; ++i) {
                const double w = time_homog ? 1.0 : grid->accrual(i);
                const auto s1 = static_cast<Eigen::Index>(g_slot(j, i));
                const auto s0 = static_cast<Eigen::Index>(g_slot(j - 1, i));
                const double d = x[s1] - x[s0];
                obj += alpha * w * d * d;
                if (grad) {
                    (*grad)[s1] += 2.0 * alpha * w * d;
                    (*grad)[s0] -= 2.0 * alpha * w * d;
                    if (hess) {
                        (*hess)(s1, s1) += 2.0 * alpha * w;
                        (*hess)(s0, s0) += 2.0 * alpha * w;
                        (*hess)(s1, s0) -= 2.0 * alpha * w;
                        (*hess)(s0, s1) -= 2.0 * alpha * w;
                    }
                }
            }
        }
        if (solve_rho) {
            for (std::size_t i = 2; i <= n_rho; ++i) {
                const auto s1 = static_cast<Eigen::Index>(rho_slot(i));
                const auto s0 = static_cast<Eigen::Index>(rho_slot(i - 1));
                const double d = x[s1] - x[s0];
                obj += beta * d * d;
                if (grad) {
                    (*grad)[s1] += 2.0 * beta * d;
                    (*grad)[s0] -= 2.0 * beta * d;
                    if (hess) {
                        (*hess)(s1, s1) += 2.0 * beta;
                        (*hess)(s0, s0) += 2.0 * beta;
                        (*hess)(s1, s0) -= 2.0 * beta;
                        (*hess)(s0, s1) -= 2.0 * beta;
                    }
                }
            }
        }
        return obj;
    }

    void clamp(Eigen::VectorXd& x) const {
        for (std::size_t s = 0; s < n_g; ++s)
            x[static_cast<Eigen::Index>(s)] =
                std::clamp(x[static_cast<Eigen::Index>(s)], 0.0, g_max);
        if (solve_rho)
            for (std::size_t s = n_g; s < dim(); ++s)
                x[static_cast<Eigen::Index>(s)] =
                    std::clamp(x[static_cast<Eigen::Index>(s)], -1.0, 1.0);
    }
};

}  // namespace

CalibrationResult calibrate_nonparametric(const NominalCurve& nominal,
                                          const InflationCurve& inflation, const TenorGrid& grid,
                                          std::vector<CalibrationTarget> targets,
                                          const CalibrationOptions& options) {
    if (targets.empty()) throw ModelError("calibration: no targets");
    if (!(options.alpha > 0.0)) throw ModelError("calibration: alpha must be positive");
    if (options.solve_rho && !(options.beta > 0.0))
        throw ModelError("calibration: beta must be positive when solving for rho");

    // cap-price targets reduce to per-caplet vol targets via the bootstrap
    std::vector<CapQuote> cap_quotes;
    std::vector<CalibrationTarget> vol_targets;
    for (const auto& t : targets) {
        if (t.kind == CalibrationTarget::Kind::CapPrice)
            cap_quotes.push_back({grid.date(t.index), t.strike, t.value});
        else {
            if (!(t.value > 0.0) || !std::isfinite(t.value))
                throw ModelError("calibration: vol targets must be positive and finite");
            vol_targets.push_back(t);
        }
    }
    if (!cap_quotes.empty()) {
        std::sort(cap_quotes.begin(), cap_quotes.end(),
                  [](const CapQuote& a, const CapQuote& b) { return a.maturity < b.maturity; });
        const auto bs = bootstrap_caplet_vols(nominal, inflation, grid, cap_quotes);
        for (std::size_t j = 1; j <= bs.caplet_vols.size(); ++j)
            vol_targets.push_back(CalibrationTarget::caplet_vol(j, bs.caplet_vols[j - 1]));
    }

    Problem pb;
    pb.grid = &grid;
    pb.time_homog = options.time_homogeneous;
    pb.solve_rho = options.solve_rho;
    pb.rho_fixed = options.rho;
    pb.alpha = options.alpha;
    pb.beta = options.beta;

    std::size_t n_use = 0, n_rho = 0;
    for (const auto& t : vol_targets) {
        if (t.kind == CalibrationTarget::Kind::CapletVol) {
            if (t.index < 1 || t.index > grid.periods())
                throw ModelError("calibration: caplet index out of grid");
            n_use = std::max(n_use, t.index);
        } else {
            if (!(t.m < t.n) || t.n > grid.periods())
                throw ModelError("calibration: swaption span out of grid");
            n_use = std::max(n_use, t.n);
            n_rho = std::max(n_rho, t.m);
        }
    }
    pb.n_use = n_use;
    if (options.solve_rho && n_rho == 0)
        throw ModelError("correlation is unidentifiable: no swaption targets supply "
                         "cross-sensitivity between the factors");
    pb.n_rho = n_rho;

    if (pb.time_homog) {
        pb.n_g = n_use;
    } else {
        pb.g_offset.resize(n_use);
        std::size_t off = 0;
        for (std::size_t j = 1; j <= n_use; ++j) {
            pb.g_offset[j - 1] = off;
            off += j;  // intervals 1..j
        }
        pb.n_g = off;
    }

    std::vector<double> nominal_vol = options.nominal_vol;
    if (nominal_vol.empty()) nominal_vol.assign(grid.periods(), 0.0);
    if (nominal_vol.size() != grid.periods())
        throw ModelError("calibration: nominal_vol needs one entry per grid period");

    const auto f0 = initial_nominal_forwards(nominal, grid);
    const auto w0 = drift_weights(grid, f0);

    for (const auto& t : vol_targets) {
        Problem::Constraint cn;
        cn.target = t;
        if (t.kind == CalibrationTarget::Kind::SwaptionVol) {
            Problem::SwaptionData sd;
            sd.m = t.m;
            sd.n = t.n;
            sd.t_m = grid.date(t.m);
            if (!(sd.t_m > 0.0)) throw ModelError("calibration: swaption expiry must be positive");
            const SwapRateView view = swap_rate_view(nominal, inflation, grid, t.m, t.n);
            sd.alpha_w = view.alpha;
            sd.a.resize(t.m);
            sd.b.resize(t.m);
            for (std::size_t i = 1; i <= t.m; ++i) {
                sd.a[i - 1] = grid.accrual(i);
                // scalar bond vols on the nominal factor, weights frozen at 0
                double b = 0.0;
                for (std::size_t l = t.m + 1; l <= t.n; ++l) {
                    double sig = 0.0;
                    for (std::size_t k = i; k < l; ++k) sig -= w0[k] * nominal_vol[k];
                    b += (view.alpha[l - t.m - 1] - view.omega[l - t.m - 1]) * sig;
                }
                sd.b[i - 1] = b;
            }
            cn.swaption_slot = static_cast<int>(pb.swaptions.size());
            pb.swaptions.push_back(std::move(sd));
        }
        pb.constraints.push_back(std::move(cn));
    }

    const std::size_t dim = pb.dim();
    const std::size_t nt = pb.constraints.size();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));

    // initial guess: caplet targets seed their own maturities, neighbours fill
    std::vector<double> seed(n_use + 1, 0.0);
    for (const auto& t : vol_targets)
        if (t.kind == CalibrationTarget::Kind::CapletVol) seed[t.index] = t.value;
    double last_seed = 0.005;
    for (std::size_t j = 1; j <= n_use; ++j) {
        if (seed[j] > 0.0)
            last_seed = seed[j];
        else
            seed[j] = last_seed;
    }
    for (std::size_t j = 1; j <= n_use; ++j) {
        if (pb.time_homog)
            x[static_cast<Eigen::Index>(pb.g_slot(j, 1))] = seed[j];
        else
            for (std::size_t i = 1; i <= j; ++i)
                x[static_cast<Eigen::Index>(pb.g_slot(j, i))] = seed[j];
    }
    if (pb.solve_rho)
        for (std::size_t i = 1; i <= n_rho; ++i)
            x[static_cast<Eigen::Index>(pb.rho_slot(i))] = std::clamp(options.rho, -1.0, 1.0);
    pb.clamp(x);

    // augmented Lagrangian outer loop
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nt));
    double mu = 10.0;
    CalibrationResult result;
    bool feasible = false, stationary = false;

    auto merit = [&](const Eigen::VectorXd& xx, Eigen::VectorXd* grad, Eigen::MatrixXd* hess,
                     double* obj_out, double* viol_out) {
        if (grad) grad->setZero();
        if (hess) hess->setZero();
        double m_val = pb.objective(xx, grad, hess);
        if (obj_out) *obj_out = m_val;
        double viol = 0.0;
        for (std::size_t t = 0; t < nt; ++t) {
            const double w = std::sqrt(pb.constraints[t].target.weight);
            // gradient scale for c-terms: (lambda + mu c) * w applied to grad c
            const double c = pb.constraint_value(t, xx, nullptr, nullptr, 0.0) * w;
            viol = std::max(viol, std::fabs(c) / w);
            m_val += lambda[static_cast<Eigen::Index>(t)] * c + 0.5 * mu * c * c;
            if (grad) {
                const double gs = (lambda[static_cast<Eigen::Index>(t)] + mu * c) * w;
                // accumulate gs * grad c and, for the Hessian, gs * hess c
                pb.constraint_value(t, xx, grad, hess, gs);
                if (hess) {
                    // Gauss-Newton term mu * w^2 grad c grad c^T
                    Eigen::VectorXd gc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
                    pb.constraint_value(t, xx, &gc, nullptr, w);
                    hess->noalias() += mu * gc * gc.transpose();
                }
            }
        }
        if (viol_out) *viol_out = viol;
        return m_val;
    };

    double prev_viol = std::numeric_limits<double>::infinity();
    const int max_outer = 40;
    int total_inner = 0;

    for (int outer = 0; outer < max_outer; ++outer) {
        // projected Newton inner loop
        Eigen::VectorXd grad(static_cast<Eigen::Index>(dim));
        Eigen::MatrixXd hess(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        stationary = false;
        for (int inner = 0; inner < 100; ++inner) {
            if (total_inner++ > options.max_iterations) break;
            double obj_val = 0.0, viol = 0.0;
            const double m0 = merit(x, &grad, &hess, &obj_val, &viol);
            result.iterations.push_back({outer, inner, m0, obj_val, viol});

            // projected-gradient stationarity
            Eigen::VectorXd xs = x - grad;
            pb.clamp(xs);
            const double pg = (x - xs).lpNorm<Eigen::Infinity>();
            if (pg < options.stationarity_tol * (1.0 + mu)) {
                stationary = true;
                break;
            }

            Eigen::VectorXd dx;
            double tau = 0.0;
            for (int bump = 0; bump < 12; ++bump) {
                Eigen::MatrixXd h = hess;
                if (tau > 0.0)
                    h.diagonal().array() += tau;
                Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
                dx = ldlt.solve(-grad);
                if (ldlt.info() == Eigen::Success && grad.dot(dx) < 0.0) break;
                tau = tau == 0.0 ? 1e-8 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff()) : tau * 100.0;
            }
            if (grad.dot(dx) >= 0.0) dx = -grad;

            double step = 1.0;
            bool accepted = false;
            for (int ls = 0; ls < 40; ++ls) {
                Eigen::VectorXd xn = x + step * dx;
                pb.clamp(xn);
                const double mn = merit(xn, nullptr, nullptr, nullptr, nullptr);
                if (mn <= m0 - 1e-12 * std::fabs(m0) - 1e-16 ||
                    (mn < m0 && (xn - x).lpNorm<Eigen::Infinity>() > 0.0)) {
                    x = xn;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) {
                stationary = true;
                break;
            }
        }

        double viol = 0.0;
        Eigen::VectorXd cvals(static_cast<Eigen::Index>(nt));
        for (std::size_t t = 0; t < nt; ++t) {
            const double w = std::sqrt(pb.constraints[t].target.weight);
            cvals[static_cast<Eigen::Index>(t)] =
                pb.constraint_value(t, x, nullptr, nullptr, 0.0) * w;
            viol = std::max(viol, std::fabs(cvals[static_cast<Eigen::Index>(t)]) / w);
        }
        feasible = viol <= options.constraint_tol;
        if (feasible && stationary) break;
        if (total_inner > options.max_iterations) break;

        lambda += mu * cvals;
        if (viol > 0.25 * prev_viol) mu = std::min(mu * 10.0, 1e12);
        prev_viol = viol;
    }

    // final diagnostics
    result.residuals.resize(nt);
    result.residuals_relative.resize(nt);
    double viol = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
        const double c = pb.constraint_value(t, x, nullptr, nullptr, 0.0);
        result.residuals_relative[t] = c;
        result.residuals[t] = pb.absolute_residual(t, x);
        viol = std::max(viol, std::fabs(c));
    }
    result.objective = pb.objective(x, nullptr, nullptr);
    result.converged = viol <= options.constraint_tol;

    if (!result.converged) {
        // identify targets outside their attainable range
        std::ostringstream msg;
        bool provably_infeasible = false;
        for (std::size_t t = 0; t < nt; ++t) {
            if (std::fabs(result.residuals_relative[t]) <= options.constraint_tol) continue;
            const auto& tg = pb.constraints[t].target;
            if (tg.kind == CalibrationTarget::Kind::SwaptionVol && pb.solve_rho) {
                const auto& sd = pb.swaptions[static_cast<std::size_t>(pb.constraints[t].swaption_slot)];
                double vmin = 0.0, vmax = 0.0;
                for (std::size_t i = 1; i <= sd.m; ++i) {
                    double av = 0.0;
                    for (std::size_t l = sd.m + 1; l <= sd.n; ++l)
                        av += sd.alpha_w[l - sd.m - 1] *
                              x[static_cast<Eigen::Index>(pb.g_slot(l, i))];
                    const double b = sd.b[i - 1];
                    vmin += sd.a[i - 1] * (av * av + b * b - 2.0 * std::fabs(av * b));
                    vmax += sd.a[i - 1] * (av * av + b * b + 2.0 * std::fabs(av * b));
                }
                const double smin = std::sqrt(std::max(vmin, 0.0) / sd.t_m);
                const double smax = std::sqrt(vmax / sd.t_m);
                if (tg.value < smin || tg.value > smax) {
                    provably_infeasible = true;
                    msg << "swaption (" << sd.m << "," << sd.n << ") vol target " << tg.value
                        << " outside attainable range [" << smin << ", " << smax
                        << "] at the calibrated loadings; ";
                }
            } else {
                msg << "target #" << t << " unresolved (relative residual "
                    << result.residuals_relative[t] << "); ";
            }
        }
        if (provably_infeasible)
            throw ModelError("calibration infeasible: " + msg.str());
        result.message = "calibration did not converge within iteration budget: " + msg.str();
    }

    // assemble the surface
    result.inflation_vols.resize(grid.periods());
    std::vector<std::vector<double>> pw(grid.periods());
    for (std::size_t j = 1; j <= grid.periods(); ++j) {
        pw[j - 1].assign(grid.size(), 0.0);
        result.inflation_vols[j - 1].assign(j, 0.0);
        for (std::size_t i = 1; i <= j; ++i) {
            const double g =
                j <= n_use ? x[static_cast<Eigen::Index>(pb.g_slot(j, i))] : 0.0;
            result.inflation_vols[j - 1][i - 1] = g;
            pw[j - 1][i] = g;
        }
        pw[j - 1][0] = pw[j - 1].size() > 1 ? pw[j - 1][1] : 0.0;
    }
    if (pb.solve_rho) {
        result.rho.resize(n_rho);
        for (std::size_t i = 1; i <= n_rho; ++i)
            result.rho[i - 1] = x[static_cast<Eigen::Index>(pb.rho_slot(i))];
    } else {
        result.rho = {options.rho};
    }
    const CorrelationSpec corr = result.rho.size() == 1
                                     ? CorrelationSpec::two_factor(result.rho.front())
                                     : CorrelationSpec::two_factor_piecewise(result.rho);
    result.surface = VolSurface::two_factor_piecewise(grid, nominal_vol, pw, corr);
    return result;
}

CalibrationResult implied_correlation(const NominalCurve& nominal,
                                      const InflationCurve& inflation, const TenorGrid& grid,
                                      std::vector<CalibrationTarget> targets,
                                      const CalibrationOptions& options) {
    bool has_swaption = false;
    for (const auto& t : targets)
        if (t.kind == CalibrationTarget::Kind::SwaptionVol) has_swaption = true;
    if (!has_swaption)
        throw ModelError("correlation is unidentifiable: caplet targets alone carry no "
                         "cross-sensitivity; supply swaption vols");
    CalibrationOptions opt = options;
    opt.solve_rho = true;
    return calibrate_nonparametric(nominal, inflation, grid, std::move(targets), opt);
}

}  // namespace ilmm
