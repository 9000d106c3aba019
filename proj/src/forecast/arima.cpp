#include "gridshed/forecast/arima.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "gridshed/core/errors.hpp"

namespace gridshed::forecast {

namespace {

/// Linear interpolation over gaps; leading/trailing gaps take the nearest
/// observed value.
std::vector<double> interpolate_gaps(const HourlySeries& series) {
    const std::size_t n = series.size();
    std::vector<double> y(series.values);
    std::size_t first = n, last = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (!HourlySeries::is_gap_value(y[i])) {
            if (first == n) first = i;
            last = i;
        }
    }
    if (first == n) {
        throw ValidationError("fit_arima: series is all gaps");
    }
    for (std::size_t i = 0; i < first; ++i) y[i] = y[first];
    for (std::size_t i = last + 1; i < n; ++i) y[i] = y[last];
    std::size_t prev = first;
    for (std::size_t i = first + 1; i <= last; ++i) {
        if (HourlySeries::is_gap_value(y[i])) continue;
        if (i > prev + 1) {
            const double step = (y[i] - y[prev]) / static_cast<double>(i - prev);
            for (std::size_t g = prev + 1; g < i; ++g) {
                y[g] = y[prev] + step * static_cast<double>(g - prev);
            }
        }
        prev = i;
    }
    for (double v : y) {
        if (!std::isfinite(v)) {
            throw ValidationError("fit_arima: non-finite value after interpolation");
        }
    }
    return y;
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

/// Composite polynomial with leading 1; `sign` is -1 for the AR side.
std::vector<double> composite_poly(const Eigen::VectorXd& coef, int plain, int seasonal,
                                   int season, double sign, int offset) {
    std::vector<double> simple(static_cast<std::size_t>(plain) + 1, 0.0);
    simple[0] = 1.0;
    for (int i = 0; i < plain; ++i) simple[static_cast<std::size_t>(i) + 1] = sign * coef(offset + i);
    if (seasonal == 0) return simple;
    std::vector<double> periodic(static_cast<std::size_t>(seasonal * season) + 1, 0.0);
    periodic[0] = 1.0;
    for (int j = 0; j < seasonal; ++j) {
        periodic[static_cast<std::size_t>((j + 1) * season)] = sign * coef(offset + plain + j);
    }
    return poly_mul(simple, periodic);
}

struct Polys {
    std::vector<double> ar;  // 1 + a1 B + ... (negated phi inside)
    std::vector<double> ma;  // 1 + theta1 B + ...
};

Polys build_polys(const ArimaSpec& spec, const Eigen::VectorXd& params) {
    const int P = spec.seasonal ? spec.seasonal->P : 0;
    const int Q = spec.seasonal ? spec.seasonal->Q : 0;
    const int s = spec.seasonal ? spec.seasonal->s : 1;
    Polys polys;
    // param layout: [phi(p), theta(q), PHI(P), THETA(Q)]
    Eigen::VectorXd ar_part(spec.p + P);
    ar_part.head(spec.p) = params.head(spec.p);
    ar_part.tail(P) = params.segment(spec.p + spec.q, P);
    Eigen::VectorXd ma_part(spec.q + Q);
    ma_part.head(spec.q) = params.segment(spec.p, spec.q);
    ma_part.tail(Q) = params.tail(Q);
    polys.ar = composite_poly(ar_part, spec.p, P, s, -1.0, 0);
    polys.ma = composite_poly(ma_part, spec.q, Q, s, +1.0, 0);
    return polys;
}

/// Innovations under the conditional convention (presample values zero).
void compute_residuals(const std::vector<double>& w, const Polys& polys,
                       std::vector<double>& eps) {
    const std::size_t n = w.size();
    const std::size_t pc = polys.ar.size() - 1;
    const std::size_t qc = polys.ma.size() - 1;
    eps.assign(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        double value = w[t];
        for (std::size_t i = 1; i <= std::min(pc, t); ++i) value += polys.ar[i] * w[t - i];
        for (std::size_t j = 1; j <= std::min(qc, t); ++j) value -= polys.ma[j] * eps[t - j];
        eps[t] = value;
    }
}

double css(const std::vector<double>& eps, std::size_t skip) {
    double total = 0.0;
    for (std::size_t t = skip; t < eps.size(); ++t) total += eps[t] * eps[t];
    return total;
}

/// Spectral radius of the companion matrix of the monic polynomial
/// lambda^m + c1 lambda^(m-1) + ... + cm, estimated from iterate growth.
double companion_spectral_radius(const std::vector<double>& poly) {
    const std::size_t m = poly.size() - 1;
    if (m == 0) return 0.0;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                                 static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) comp(0, static_cast<Eigen::Index>(j)) = -poly[j + 1];
    for (std::size_t i = 1; i < m; ++i) comp(static_cast<Eigen::Index>(i),
                                             static_cast<Eigen::Index>(i - 1)) = 1.0;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m));
    v.normalize();
    double log_growth = 0.0;
    const int iters = 200;
    for (int it = 0; it < iters; ++it) {
        v = comp * v;
        const double norm = v.norm();
        if (norm < 1e-300) return 0.0;
        log_growth += std::log(norm);
        v /= norm;
    }
    return std::exp(log_growth / iters);
}

Eigen::VectorXd ols(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    return a.colPivHouseholderQr().solve(b);
}

/// Hannan-Rissanen starting values for the free parameters.
Eigen::VectorXd hannan_rissanen(const std::vector<double>& w, const ArimaSpec& spec) {
    const int P = spec.seasonal ? spec.seasonal->P : 0;
    const int Q = spec.seasonal ? spec.seasonal->Q : 0;
    const int s = spec.seasonal ? spec.seasonal->s : 1;
    const int np = spec.p + spec.q + P + Q;
    const long n = static_cast<long>(w.size());

    std::vector<long> ar_lags, ma_lags;
    for (int i = 1; i <= spec.p; ++i) ar_lags.push_back(i);
    for (int j = 1; j <= P; ++j) ar_lags.push_back(static_cast<long>(j) * s);
    for (int i = 1; i <= spec.q; ++i) ma_lags.push_back(i);
    for (int j = 1; j <= Q; ++j) ma_lags.push_back(static_cast<long>(j) * s);

    std::vector<double> ehat;
    if (!ma_lags.empty()) {
        // Long AR fit for innovation estimates.
        const long pc = spec.p + static_cast<long>(P) * s;
        const long qc = spec.q + static_cast<long>(Q) * s;
        long m = std::max<long>(20, 2 * (pc + qc));
        m = std::min(m, (n - 1) / 3);
        m = std::max<long>(m, 1);
        const long rows = n - m;
        ehat.assign(w.size(), 0.0);
        if (rows > m) {
            Eigen::MatrixXd design(rows, m);
            Eigen::VectorXd target(rows);
            for (long t = m; t < n; ++t) {
                target(t - m) = w[static_cast<std::size_t>(t)];
                for (long i = 1; i <= m; ++i) {
                    design(t - m, i - 1) = w[static_cast<std::size_t>(t - i)];
                }
            }
            const Eigen::VectorXd a = ols(design, target);
            for (long t = m; t < n; ++t) {
                double pred = 0.0;
                for (long i = 1; i <= m; ++i) pred += a(i - 1) * w[static_cast<std::size_t>(t - i)];
                ehat[static_cast<std::size_t>(t)] = w[static_cast<std::size_t>(t)] - pred;
            }
        }
    }

    long max_lag = 0;
    for (long l : ar_lags) max_lag = std::max(max_lag, l);
    for (long l : ma_lags) max_lag = std::max(max_lag, l);
    const long t0 = max_lag;
    const long rows = n - t0;
    Eigen::VectorXd init = Eigen::VectorXd::Zero(np);
    if (rows > np && np > 0) {
        Eigen::MatrixXd design(rows, np);
        Eigen::VectorXd target(rows);
        for (long t = t0; t < n; ++t) {
            target(t - t0) = w[static_cast<std::size_t>(t)];
            long col = 0;
            for (long l : ar_lags) design(t - t0, col++) = w[static_cast<std::size_t>(t - l)];
            for (long l : ma_lags) {
                design(t - t0, col++) =
                    ehat.empty() ? 0.0 : ehat[static_cast<std::size_t>(t - l)];
            }
        }
        const Eigen::VectorXd beta = ols(design, target);
        // Regression order is [AR lags, MA lags]; map back to the parameter
        // layout [phi, theta, PHI, THETA].
        long col = 0;
        for (int i = 0; i < spec.p; ++i) init(i) = beta(col++);
        for (int j = 0; j < P; ++j) init(spec.p + spec.q + j) = beta(col++);
        for (int i = 0; i < spec.q; ++i) init(spec.p + i) = beta(col++);
        for (int j = 0; j < Q; ++j) init(spec.p + spec.q + P + j) = beta(col++);
    }
    for (long i = 0; i < init.size(); ++i) {
        init(i) = std::clamp(init(i), -0.95, 0.95);
        if (!std::isfinite(init(i))) init(i) = 0.0;
    }
    return init;
}

}  // namespace

void ArimaSpec::validate() const {
    if (p < 0 || d < 0 || q < 0) throw ArgumentError("arima orders must be >= 0");
    int sP = 0, sD = 0, sQ = 0;
    if (seasonal) {
        sP = seasonal->P;
        sD = seasonal->D;
        sQ = seasonal->Q;
        if (sP < 0 || sD < 0 || sQ < 0) throw ArgumentError("seasonal orders must be >= 0");
        if (seasonal->s < 2) throw ArgumentError("seasonal period s must be >= 2");
    }
    if (p + q + sP + sQ == 0 && d + sD == 0) {
        throw ArgumentError("arima spec has no active orders (white noise is not a model here)");
    }
}

std::string ArimaSpec::to_string() const {
    std::ostringstream out;
    out << "(" << p << "," << d << "," << q << ")";
    if (seasonal) {
        out << "(" << seasonal->P << "," << seasonal->D << "," << seasonal->Q << ")_"
            << seasonal->s;
    }
    return out.str();
}

std::vector<double> ArimaModel::composite_ar() const {
    return build_polys(spec, params).ar;
}

std::vector<double> ArimaModel::composite_ma() const {
    return build_polys(spec, params).ma;
}

ArimaModel fit_arima(const HourlySeries& train, const ArimaSpec& spec) {
    spec.validate();
    const int P = spec.seasonal ? spec.seasonal->P : 0;
    const int D = spec.seasonal ? spec.seasonal->D : 0;
    const int Q = spec.seasonal ? spec.seasonal->Q : 0;
    const int s = spec.seasonal ? spec.seasonal->s : 0;

    const long n = static_cast<long>(train.size());
    const long min_len = 10 * (spec.p + spec.q + 1) + static_cast<long>(s) * (D + P + Q);
    if (n < min_len || (spec.seasonal && n < 3L * s)) {
        throw ArgumentError("fit_arima: series too short for spec " + spec.to_string());
    }

    ArimaModel model;
    model.spec = spec;
    model.levels.push_back(interpolate_gaps(train));
    for (int i = 0; i < spec.d; ++i) model.level_lags.push_back(1);
    for (int i = 0; i < D; ++i) model.level_lags.push_back(s);

    long offset = 0;
    for (int lag : model.level_lags) {
        const std::vector<double>& prev = model.levels.back();
        std::vector<double> next(prev.size(), 0.0);
        offset += lag;
        for (long t = offset; t < n; ++t) {
            next[static_cast<std::size_t>(t)] =
                prev[static_cast<std::size_t>(t)] - prev[static_cast<std::size_t>(t - lag)];
        }
        model.levels.push_back(std::move(next));
    }
    if (n - offset < 8) {
        throw ArgumentError("fit_arima: too few observations after differencing");
    }

    // Fully differenced series, demeaned (the mean acts as drift when
    // d + D >= 1).
    std::vector<double> w(model.levels.back().begin() + offset, model.levels.back().end());
    double mu = 0.0;
    for (double v : w) mu += v;
    mu /= static_cast<double>(w.size());
    model.mean = mu;
    for (double& v : w) v -= mu;

    const int np = spec.p + spec.q + P + Q;
    model.params = Eigen::VectorXd::Zero(np);
    std::vector<double> eps;
    if (np > 0) {
        model.params = hannan_rissanen(w, spec);

        Polys polys = build_polys(spec, model.params);
        const std::size_t skip = polys.ar.size() - 1;
        compute_residuals(w, polys, eps);
        double best_css = css(eps, skip);

        // Levenberg-damped Gauss-Newton with a central-difference Jacobian.
        const long rows = static_cast<long>(w.size() - skip);
        if (rows > np) {
            double lambda = 1e-6;
            Eigen::MatrixXd jac(rows, np);
            std::vector<double> eps_hi, eps_lo;
            for (int iter = 0; iter < 60; ++iter) {
                Polys cur = build_polys(spec, model.params);
                compute_residuals(w, cur, eps);
                Eigen::VectorXd r(rows);
                for (long t = 0; t < rows; ++t) r(t) = eps[skip + static_cast<std::size_t>(t)];

                for (int j = 0; j < np; ++j) {
                    const double h = 1e-6 * std::max(1.0, std::fabs(model.params(j)));
                    Eigen::VectorXd bumped = model.params;
                    bumped(j) += h;
                    compute_residuals(w, build_polys(spec, bumped), eps_hi);
                    bumped(j) -= 2.0 * h;
                    compute_residuals(w, build_polys(spec, bumped), eps_lo);
                    for (long t = 0; t < rows; ++t) {
                        jac(t, j) = (eps_hi[skip + static_cast<std::size_t>(t)] -
                                     eps_lo[skip + static_cast<std::size_t>(t)]) /
                                    (2.0 * h);
                    }
                }
                const Eigen::MatrixXd hessian = jac.transpose() * jac;
                const Eigen::VectorXd gradient = jac.transpose() * r;

                bool improved = false;
                for (int attempt = 0; attempt < 12; ++attempt) {
                    Eigen::MatrixXd damped = hessian;
                    damped.diagonal().array() += lambda * (1.0 + hessian.diagonal().array());
                    const Eigen::VectorXd step = damped.ldlt().solve(-gradient);
                    const Eigen::VectorXd candidate = model.params + step;
                    compute_residuals(w, build_polys(spec, candidate), eps);
                    const double candidate_css = css(eps, skip);
                    if (std::isfinite(candidate_css) && candidate_css < best_css) {
                        model.params = candidate;
                        improved = true;
                        lambda = std::max(lambda * 0.1, 1e-12);
                        if (best_css - candidate_css <= 1e-13 * (1.0 + best_css)) {
                            best_css = candidate_css;
                            iter = 60;  // converged
                        } else {
                            best_css = candidate_css;
                        }
                        break;
                    }
                    lambda *= 10.0;
                    if (lambda > 1e10) break;
                }
                if (!improved) break;
            }
        }
    }

    Polys final_polys = build_polys(spec, model.params);
    const std::size_t skip = final_polys.ar.size() - 1;
    compute_residuals(w, final_polys, model.residuals);
    const long n_eff = std::max<long>(1, static_cast<long>(w.size() - skip));
    model.sigma2 = css(model.residuals, skip) / static_cast<double>(n_eff);
    model.stationarity_warning = companion_spectral_radius(final_polys.ar) >= 1.0 - 1e-8;
    return model;
}

ForecastResult forecast_arima(const ArimaModel& model, int horizon) {
    if (horizon < 1) throw ArgumentError("forecast_arima: horizon must be >= 1");
    const long n = static_cast<long>(model.levels.front().size());
    long offset = 0;
    for (int lag : model.level_lags) offset += lag;

    const Polys polys{model.composite_ar(), model.composite_ma()};
    const long pc = static_cast<long>(polys.ar.size()) - 1;
    const long qc = static_cast<long>(polys.ma.size()) - 1;

    // Demeaned history of the fully differenced series.
    const std::vector<double>& last_level = model.levels.back();
    auto w_at = [&](long t) {
        return t >= offset && t < n ? last_level[static_cast<std::size_t>(t)] - model.mean : 0.0;
    };
    auto eps_at = [&](long t) {
        const long idx = t - offset;
        return idx >= 0 && idx < static_cast<long>(model.residuals.size())
                   ? model.residuals[static_cast<std::size_t>(idx)]
                   : 0.0;
    };

    std::vector<double> w_future(static_cast<std::size_t>(horizon), 0.0);
    for (int j = 0; j < horizon; ++j) {
        const long t = n + j;
        double value = 0.0;
        for (long i = 1; i <= pc; ++i) {
            const long back = t - i;
            const double w_back = back >= n ? w_future[static_cast<std::size_t>(back - n)]
                                            : w_at(back);
            value -= polys.ar[static_cast<std::size_t>(i)] * w_back;
        }
        for (long l = 1; l <= qc; ++l) {
            const long back = t - l;
            if (back < n) value += polys.ma[static_cast<std::size_t>(l)] * eps_at(back);
        }
        w_future[static_cast<std::size_t>(j)] = value;
    }

    // Undifference level by level, extending each series by the horizon.
    std::vector<std::vector<double>> extended = model.levels;
    for (auto& level : extended) level.resize(static_cast<std::size_t>(n + horizon), 0.0);
    for (int j = 0; j < horizon; ++j) {
        extended.back()[static_cast<std::size_t>(n + j)] =
            w_future[static_cast<std::size_t>(j)] + model.mean;
    }
    for (long lvl = static_cast<long>(model.level_lags.size()) - 1; lvl >= 0; --lvl) {
        const int lag = model.level_lags[static_cast<std::size_t>(lvl)];
        for (int j = 0; j < horizon; ++j) {
            const long t = n + j;
            extended[static_cast<std::size_t>(lvl)][static_cast<std::size_t>(t)] =
                extended[static_cast<std::size_t>(lvl + 1)][static_cast<std::size_t>(t)] +
                extended[static_cast<std::size_t>(lvl)][static_cast<std::size_t>(t - lag)];
        }
    }

    // Psi weights of the integrated process drive the interval widths.
    std::vector<double> full_ar = polys.ar;
    for (int i = 0; i < model.spec.d; ++i) full_ar = poly_mul(full_ar, {1.0, -1.0});
    if (model.spec.seasonal) {
        std::vector<double> seasonal_diff(static_cast<std::size_t>(model.spec.seasonal->s) + 1, 0.0);
        seasonal_diff.front() = 1.0;
        seasonal_diff.back() = -1.0;
        for (int i = 0; i < model.spec.seasonal->D; ++i) full_ar = poly_mul(full_ar, seasonal_diff);
    }
    std::vector<double> psi(static_cast<std::size_t>(horizon), 0.0);
    psi[0] = 1.0;
    for (int j = 1; j < horizon; ++j) {
        double value = j <= qc ? polys.ma[static_cast<std::size_t>(j)] : 0.0;
        const long deg = static_cast<long>(full_ar.size()) - 1;
        for (long i = 1; i <= std::min<long>(j, deg); ++i) {
            value -= full_ar[static_cast<std::size_t>(i)] * psi[static_cast<std::size_t>(j - i)];
        }
        psi[static_cast<std::size_t>(j)] = value;
    }

    ForecastResult result;
    result.point.resize(static_cast<std::size_t>(horizon));
    result.lower.resize(static_cast<std::size_t>(horizon));
    result.upper.resize(static_cast<std::size_t>(horizon));
    double var = 0.0;
    for (int j = 0; j < horizon; ++j) {
        var += model.sigma2 * psi[static_cast<std::size_t>(j)] * psi[static_cast<std::size_t>(j)];
        const double width = kZ80 * std::sqrt(std::max(var, 0.0));
        const double point = extended.front()[static_cast<std::size_t>(n + j)];
        result.point[static_cast<std::size_t>(j)] = point;
        result.lower[static_cast<std::size_t>(j)] = point - width;
        result.upper[static_cast<std::size_t>(j)] = point + width;
    }
    return result;
}

}  // namespace gridshed::forecast
