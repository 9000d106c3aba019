#include "gridshed/forecast/gru.hpp"

#include <cmath>

#include "gridshed/core/errors.hpp"
#include "gridshed/core/rng.hpp"

namespace gridshed::forecast {

namespace {

inline Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& a) {
    return 1.0 / (1.0 + (-a).exp());
}

void track(GruGateStats& stats, const Eigen::ArrayXXd& z, const Eigen::ArrayXXd& r,
           const Eigen::ArrayXXd& g) {
    stats.z_min = std::min(stats.z_min, z.minCoeff());
    stats.z_max = std::max(stats.z_max, z.maxCoeff());
    stats.r_min = std::min(stats.r_min, r.minCoeff());
    stats.r_max = std::max(stats.r_max, r.maxCoeff());
    stats.cand_min = std::min(stats.cand_min, g.minCoeff());
    stats.cand_max = std::max(stats.cand_max, g.maxCoeff());
}

}  // namespace

void GruSpec::validate() const {
    if (hidden_size < 1) throw ArgumentError("gru hidden_size must be >= 1");
    if (lookback < 1) throw ArgumentError("gru lookback must be >= 1");
    if (epochs < 0) throw ArgumentError("gru epochs must be >= 0");
    if (!(learning_rate > 0.0)) throw ArgumentError("gru learning_rate must be > 0");
}

GruParamView gru_params(GruModel& model) {
    GruParamView view;
    auto add = [&](double* data, long size) {
        view.blocks.push_back(data);
        view.sizes.push_back(size);
        view.total += size;
    };
    const long h = model.spec.hidden_size;
    add(model.w_z.data(), h);
    add(model.u_z.data(), h * h);
    add(model.b_z.data(), h);
    add(model.w_r.data(), h);
    add(model.u_r.data(), h * h);
    add(model.b_r.data(), h);
    add(model.w_h.data(), h);
    add(model.u_h.data(), h * h);
    add(model.b_h.data(), h);
    add(model.w_out.data(), h);
    add(&model.b_out, 1);
    return view;
}

double gru_loss_and_gradient(GruModel& model, const Eigen::MatrixXd& windows,
                             const Eigen::VectorXd& targets, Eigen::VectorXd* grad) {
    const Eigen::Index n = windows.rows();
    const Eigen::Index steps = windows.cols();
    const Eigen::Index h = model.spec.hidden_size;
    if (n == 0 || targets.size() != n) {
        throw ArgumentError("gru_loss_and_gradient: bad batch shape");
    }

    // Forward, storing gate activations per step for the backward pass.
    std::vector<Eigen::ArrayXXd> zs(steps), rs(steps), gs(steps);
    std::vector<Eigen::MatrixXd> hs(steps);
    Eigen::MatrixXd h_prev = Eigen::MatrixXd::Zero(n, h);
    for (Eigen::Index t = 0; t < steps; ++t) {
        const Eigen::VectorXd x = windows.col(t);
        Eigen::ArrayXXd z =
            sigmoid(((x * model.w_z.transpose() + h_prev * model.u_z.transpose()).rowwise() +
                     model.b_z.transpose())
                        .array());
        Eigen::ArrayXXd r =
            sigmoid(((x * model.w_r.transpose() + h_prev * model.u_r.transpose()).rowwise() +
                     model.b_r.transpose())
                        .array());
        Eigen::MatrixXd gated = r * h_prev.array();
        Eigen::ArrayXXd g =
            ((x * model.w_h.transpose() + gated * model.u_h.transpose()).rowwise() +
             model.b_h.transpose())
                .array()
                .tanh();
        hs[t] = (1.0 - z) * h_prev.array() + z * g;
        track(model.gate_stats, z, r, g);
        zs[t] = std::move(z);
        rs[t] = std::move(r);
        gs[t] = std::move(g);
        h_prev = hs[t];
    }

    const Eigen::VectorXd pred = (hs[steps - 1] * model.w_out).array() + model.b_out;
    const Eigen::VectorXd err = pred - targets;
    const double loss = err.squaredNorm() / static_cast<double>(n);
    if (grad == nullptr) return loss;

    const double inv_n = 2.0 / static_cast<double>(n);
    Eigen::VectorXd gw_z = Eigen::VectorXd::Zero(h), gw_r = Eigen::VectorXd::Zero(h),
                    gw_h = Eigen::VectorXd::Zero(h);
    Eigen::MatrixXd gu_z = Eigen::MatrixXd::Zero(h, h), gu_r = Eigen::MatrixXd::Zero(h, h),
                    gu_h = Eigen::MatrixXd::Zero(h, h);
    Eigen::VectorXd gb_z = Eigen::VectorXd::Zero(h), gb_r = Eigen::VectorXd::Zero(h),
                    gb_h = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd gw_out = inv_n * (hs[steps - 1].transpose() * err);
    const double gb_out = inv_n * err.sum();

    Eigen::MatrixXd dh = inv_n * (err * model.w_out.transpose());
    for (Eigen::Index t = steps - 1; t >= 0; --t) {
        const Eigen::MatrixXd h_before =
            t > 0 ? hs[t - 1] : Eigen::MatrixXd::Zero(n, h);
        const Eigen::VectorXd x = windows.col(t);
        const Eigen::ArrayXXd& z = zs[t];
        const Eigen::ArrayXXd& r = rs[t];
        const Eigen::ArrayXXd& g = gs[t];

        const Eigen::ArrayXXd dz = dh.array() * (g - h_before.array());
        const Eigen::ArrayXXd dg = dh.array() * z;
        Eigen::MatrixXd dh_prev = (dh.array() * (1.0 - z)).matrix();

        const Eigen::MatrixXd da_h = (dg * (1.0 - g * g)).matrix();
        const Eigen::MatrixXd gated = (r * h_before.array()).matrix();
        gw_h.noalias() += da_h.transpose() * x;
        gu_h.noalias() += da_h.transpose() * gated;
        gb_h += da_h.colwise().sum().transpose();
        const Eigen::MatrixXd d_gated = da_h * model.u_h;
        const Eigen::ArrayXXd dr = d_gated.array() * h_before.array();
        dh_prev.array() += d_gated.array() * r;

        const Eigen::MatrixXd da_r = (dr * r * (1.0 - r)).matrix();
        gw_r.noalias() += da_r.transpose() * x;
        gu_r.noalias() += da_r.transpose() * h_before;
        gb_r += da_r.colwise().sum().transpose();
        dh_prev.noalias() += da_r * model.u_r;

        const Eigen::MatrixXd da_z = (dz * z * (1.0 - z)).matrix();
        gw_z.noalias() += da_z.transpose() * x;
        gu_z.noalias() += da_z.transpose() * h_before;
        gb_z += da_z.colwise().sum().transpose();
        dh_prev.noalias() += da_z * model.u_z;

        dh = std::move(dh_prev);
    }

    grad->resize(gru_params(model).total);
    long at = 0;
    auto put = [&](const double* data, long size) {
        for (long i = 0; i < size; ++i) (*grad)(at++) = data[i];
    };
    put(gw_z.data(), h);
    put(gu_z.data(), h * h);
    put(gb_z.data(), h);
    put(gw_r.data(), h);
    put(gu_r.data(), h * h);
    put(gb_r.data(), h);
    put(gw_h.data(), h);
    put(gu_h.data(), h * h);
    put(gb_h.data(), h);
    put(gw_out.data(), h);
    put(&gb_out, 1);
    return loss;
}

Eigen::VectorXd GruModel::run_window(const Eigen::VectorXd& scaled_window) const {
    const Eigen::Index h = spec.hidden_size;
    Eigen::VectorXd state = Eigen::VectorXd::Zero(h);
    for (Eigen::Index t = 0; t < scaled_window.size(); ++t) {
        const double x = scaled_window(t);
        const Eigen::ArrayXd z =
            1.0 / (1.0 + (-(w_z * x + u_z * state + b_z)).array().exp());
        const Eigen::ArrayXd r =
            1.0 / (1.0 + (-(w_r * x + u_r * state + b_r)).array().exp());
        const Eigen::ArrayXd g =
            (w_h * x + u_h * (r * state.array()).matrix() + b_h).array().tanh();
        state = ((1.0 - z) * state.array() + z * g).matrix();
    }
    return state;
}

double GruModel::predict_next(const std::vector<double>& recent_unscaled) const {
    if (recent_unscaled.size() != static_cast<std::size_t>(spec.lookback)) {
        throw ArgumentError("predict_next: window length must equal lookback");
    }
    Eigen::VectorXd window(spec.lookback);
    for (int i = 0; i < spec.lookback; ++i) {
        window(i) = (recent_unscaled[static_cast<std::size_t>(i)] - scale_min) / scale_range;
    }
    const double scaled = run_window(window).dot(w_out) + b_out;
    return scaled * scale_range + scale_min;
}

GruModel fit_gru(const HourlySeries& train, const GruSpec& spec) {
    spec.validate();
    const long n = static_cast<long>(train.size());
    const int lookback = spec.lookback;
    if (n < lookback + 1) {
        throw ArgumentError("fit_gru: series shorter than lookback + 1");
    }

    // Windows of lookback inputs plus a target, none of them gapped.
    std::vector<long> starts;
    for (long i = 0; i + lookback < n; ++i) {
        bool ok = true;
        for (long t = i; t <= i + lookback; ++t) {
            if (train.is_gap(static_cast<std::size_t>(t))) {
                ok = false;
                break;
            }
        }
        if (ok) starts.push_back(i);
    }
    if (starts.empty()) {
        throw ArgumentError("fit_gru: no gap-free training window available");
    }

    GruModel model;
    model.spec = spec;

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (long i = 0; i < n; ++i) {
        if (train.is_gap(static_cast<std::size_t>(i))) continue;
        lo = std::min(lo, train.values[static_cast<std::size_t>(i)]);
        hi = std::max(hi, train.values[static_cast<std::size_t>(i)]);
    }
    model.scale_min = lo;
    model.scale_range = hi - lo > 0.0 ? hi - lo : 1.0;

    const auto n_windows = static_cast<Eigen::Index>(starts.size());
    Eigen::MatrixXd windows(n_windows, lookback);
    Eigen::VectorXd targets(n_windows);
    for (Eigen::Index w = 0; w < n_windows; ++w) {
        const long start = starts[static_cast<std::size_t>(w)];
        for (int t = 0; t < lookback; ++t) {
            windows(w, t) =
                (train.values[static_cast<std::size_t>(start + t)] - model.scale_min) /
                model.scale_range;
        }
        targets(w) = (train.values[static_cast<std::size_t>(start + lookback)] -
                      model.scale_min) /
                     model.scale_range;
    }

    // Uniform init in +-1/sqrt(H) for weights, zero biases; fixed draw order.
    const int h = spec.hidden_size;
    const double bound = 1.0 / std::sqrt(static_cast<double>(h));
    Rng rng(derive_seed(spec.seed, "gru-init"));
    auto draw_vec = [&](Eigen::VectorXd& v) {
        v.resize(h);
        for (int i = 0; i < h; ++i) v(i) = rng.uniform(-bound, bound);
    };
    auto draw_mat = [&](Eigen::MatrixXd& m) {
        m.resize(h, h);
        for (int c = 0; c < h; ++c) {
            for (int r = 0; r < h; ++r) m(r, c) = rng.uniform(-bound, bound);
        }
    };
    draw_vec(model.w_z);
    draw_mat(model.u_z);
    draw_vec(model.w_r);
    draw_mat(model.u_r);
    draw_vec(model.w_h);
    draw_mat(model.u_h);
    draw_vec(model.w_out);
    model.b_z = Eigen::VectorXd::Zero(h);
    model.b_r = Eigen::VectorXd::Zero(h);
    model.b_h = Eigen::VectorXd::Zero(h);
    model.b_out = 0.0;

    // Full-batch Adam.
    GruParamView view = gru_params(model);
    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(view.total);
    Eigen::VectorXd m2 = Eigen::VectorXd::Zero(view.total);
    Eigen::VectorXd grad(view.total);
    const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    for (int epoch = 1; epoch <= spec.epochs; ++epoch) {
        const double loss = gru_loss_and_gradient(model, windows, targets, &grad);
        model.loss_trace.push_back(loss);
        m1 = beta1 * m1 + (1.0 - beta1) * grad;
        m2 = beta2 * m2 + (1.0 - beta2) * grad.cwiseProduct(grad);
        const double c1 = 1.0 - std::pow(beta1, epoch);
        const double c2 = 1.0 - std::pow(beta2, epoch);
        long at = 0;
        for (std::size_t blk = 0; blk < view.blocks.size(); ++blk) {
            double* data = view.blocks[blk];
            for (long i = 0; i < view.sizes[blk]; ++i, ++at) {
                const double mhat = m1(at) / c1;
                const double vhat = m2(at) / c2;
                data[i] -= spec.learning_rate * mhat / (std::sqrt(vhat) + adam_eps);
            }
        }
    }

    // Seed window for recursive forecasting: the last lookback values with
    // gaps carried forward from the most recent observation.
    model.train_tail.resize(static_cast<std::size_t>(lookback));
    double carry = train.values[static_cast<std::size_t>(n - 1)];
    if (HourlySeries::is_gap_value(carry)) carry = model.scale_min;
    for (long i = n - lookback; i < n; ++i) {
        double v = train.values[static_cast<std::size_t>(i)];
        if (HourlySeries::is_gap_value(v)) v = carry;
        carry = v;
        model.train_tail[static_cast<std::size_t>(i - (n - lookback))] = v;
    }
    return model;
}

ForecastResult forecast_gru(const GruModel& model, int horizon) {
    if (horizon < 1) throw ArgumentError("forecast_gru: horizon must be >= 1");
    std::vector<double> window = model.train_tail;
    ForecastResult result;
    result.point.reserve(static_cast<std::size_t>(horizon));
    for (int j = 0; j < horizon; ++j) {
        const double next = model.predict_next(window);
        result.point.push_back(next);
        window.erase(window.begin());
        window.push_back(next);
    }
    return result;
}

}  // namespace gridshed::forecast
