#include "funcmod/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "funcmod/errors.hpp"
#include "funcmod/rng.hpp"

namespace funcmod {

namespace {

// In-place lower Cholesky of a row-major symmetric matrix; returns false when
// a pivot is not positive.
bool cholesky(std::vector<double>& a, size_t n) {
    for (size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
        if (!(d > 0) || !std::isfinite(d)) return false;
        double ljj = std::sqrt(d);
        a[j * n + j] = ljj;
        for (size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / ljj;
        }
        for (size_t k = j + 1; k < n; ++k) a[j * n + k] = 0.0;
    }
    return true;
}

// Solves L z = b in place.
void solve_lower(const std::vector<double>& L, size_t n, std::vector<double>& b) {
    for (size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (size_t k = 0; k < i; ++k) s -= L[i * n + k] * b[k];
        b[i] = s / L[i * n + i];
    }
}

// Solves L^T z = b in place.
void solve_lower_t(const std::vector<double>& L, size_t n, std::vector<double>& b) {
    for (size_t i = n; i-- > 0;) {
        double s = b[i];
        for (size_t k = i + 1; k < n; ++k) s -= L[k * n + i] * b[k];
        b[i] = s / L[i * n + i];
    }
}

std::vector<double> gram_matrix(const KernelExpr& kernel, std::span<const double> x) {
    size_t n = x.size();
    std::vector<double> K(n * n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j <= i; ++j) {
            double v = kernel_eval(kernel, x[i], x[j]);
            K[i * n + j] = v;
            K[j * n + i] = v;
        }
    }
    return K;
}

} // namespace

GpModel gp_fit(const KernelExpr& kernel, std::span<const double> x, std::span<const double> y,
               double jitter) {
    kernel.validate();
    if (x.size() != y.size()) throw InvalidInput("x/y size mismatch");
    if (x.empty()) throw InvalidInput("empty training set");

    GpModel model;
    model.kernel = kernel;
    model.train_x.assign(x.begin(), x.end());
    model.y_mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    model.train_y.resize(y.size());
    for (size_t i = 0; i < y.size(); ++i) model.train_y[i] = y[i] - model.y_mean;

    size_t n = x.size();
    std::vector<double> K = gram_matrix(kernel, x);

    double j = jitter;
    while (true) {
        std::vector<double> A = K;
        for (size_t i = 0; i < n; ++i) A[i * n + i] += j;
        if (cholesky(A, n)) {
            model.chol = std::move(A);
            model.jitter = j;
            break;
        }
        if (j >= 1e-2) throw NumericalFailure("gram matrix not positive definite at jitter 1e-2");
        j *= 10.0;
        ++model.jitter_escalations;
    }

    model.alpha = model.train_y;
    solve_lower(model.chol, n, model.alpha);
    solve_lower_t(model.chol, n, model.alpha);
    return model;
}

GpPredictions gp_predict(const GpModel& model, std::span<const double> query_x) {
    size_t n = model.train_x.size();
    GpPredictions out;
    out.points.reserve(query_x.size());
    std::vector<double> kstar(n);
    for (double q : query_x) {
        for (size_t i = 0; i < n; ++i) kstar[i] = kernel_eval(model.kernel, q, model.train_x[i]);
        double mean = model.y_mean;
        for (size_t i = 0; i < n; ++i) mean += kstar[i] * model.alpha[i];

        std::vector<double> v = kstar;
        solve_lower(model.chol, n, v);
        double kss = kernel_eval(model.kernel, q, q);
        double var = kss;
        for (size_t i = 0; i < n; ++i) var -= v[i] * v[i];
        if (var < 0) {
            ++out.clamped_negative_variance;
            var = 0.0;
        }
        out.points.push_back({mean, var});
    }
    return out;
}

double gp_log_marginal_likelihood(const GpModel& model) {
    size_t n = model.train_x.size();
    double fit = 0.0;
    for (size_t i = 0; i < n; ++i) fit += model.train_y[i] * model.alpha[i];
    double logdet = 0.0;
    for (size_t i = 0; i < n; ++i) logdet += std::log(model.chol[i * n + i]);
    return -0.5 * fit - logdet - 0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
}

double gp_lml_grad(const GpModel& model, std::vector<double>& grad) {
    size_t n = model.train_x.size();
    size_t np = model.kernel.n_params();
    grad.assign(np, 0.0);

    // K^-1 via two triangular solves against the identity
    std::vector<double> Kinv(n * n);
    std::vector<double> col(n);
    for (size_t c = 0; c < n; ++c) {
        std::fill(col.begin(), col.end(), 0.0);
        col[c] = 1.0;
        solve_lower(model.chol, n, col);
        solve_lower_t(model.chol, n, col);
        for (size_t r = 0; r < n; ++r) Kinv[r * n + c] = col[r];
    }

    // dLML/dtheta = 1/2 tr((alpha alpha^T - K^-1) dK/dtheta)
    std::vector<double> partials(np);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j <= i; ++j) {
            kernel_eval_grad(model.kernel, model.train_x[i], model.train_x[j],
                             std::span<double>(partials));
            double w = model.alpha[i] * model.alpha[j] - Kinv[i * n + j];
            double scale = (i == j) ? 0.5 : 1.0; // off-diagonal terms appear twice
            for (size_t p = 0; p < np; ++p) grad[p] += scale * w * partials[p];
        }
    }
    return gp_log_marginal_likelihood(model);
}

KernelExpr gp_optimize(const KernelExpr& kernel, std::span<const double> x,
                       std::span<const double> y, int restarts, int steps, uint64_t seed,
                       double jitter) {
    if (restarts < 1) throw InvalidInput("restarts must be >= 1");
    kernel.validate();

    const std::vector<double> init = kernel.log_params();
    const size_t np = init.size();
    constexpr double kLogLo = -12.0, kLogHi = 12.0;

    auto evaluate = [&](const std::vector<double>& logp, GpModel* out_model) -> double {
        KernelExpr k = kernel;
        k.set_log_params(logp);
        GpModel m = gp_fit(k, x, y, jitter);
        double lml = gp_log_marginal_likelihood(m);
        if (out_model) *out_model = std::move(m);
        return lml;
    };

    std::vector<double> best_logp = init;
    double best_lml = -std::numeric_limits<double>::infinity();
    try {
        best_lml = evaluate(init, nullptr);
    } catch (const NumericalFailure&) {
    }
    bool any_success = std::isfinite(best_lml);

    Rng rng = Rng(seed).split("gp-optimize");
    for (int r = 0; r < restarts; ++r) {
        std::vector<double> logp = init;
        if (r > 0) {
            Rng stream = rng.split(static_cast<uint64_t>(r));
            for (size_t p = 0; p < np; ++p)
                logp[p] = std::clamp(init[p] + stream.uniform(p, -1.5, 1.5), kLogLo, kLogHi);
        }

        // sign-based ascent with per-parameter step adaptation (iRprop- style)
        // plus a monotone guard: a move that lowers the LML is reverted and
        // all steps halve. Robust to the wildly different curvatures across
        // hyperparameters and never ends below its starting point.
        GpModel current;
        double lml;
        try {
            KernelExpr k = kernel;
            k.set_log_params(logp);
            current = gp_fit(k, x, y, jitter);
            lml = gp_log_marginal_likelihood(current);
        } catch (const NumericalFailure&) {
            continue;
        }
        any_success = true;
        if (lml > best_lml) {
            best_lml = lml;
            best_logp = logp;
        }

        std::vector<double> delta(np, 0.05);
        std::vector<double> prev_grad(np, 0.0);
        for (int t = 0; t < steps; ++t) {
            std::vector<double> grad;
            gp_lml_grad(current, grad);

            std::vector<double> trial = logp;
            std::vector<double> applied(np, 0.0);
            bool any_move = false;
            for (size_t p = 0; p < np; ++p) {
                double g = grad[p];
                if (!std::isfinite(g)) g = 0.0;
                if (g * prev_grad[p] > 0) delta[p] = std::min(0.5, delta[p] * 1.2);
                else if (g * prev_grad[p] < 0) {
                    delta[p] = std::max(1e-7, delta[p] * 0.5);
                    g = 0.0; // hold one turn after a sign flip
                }
                applied[p] = g;
                if (g > 0) trial[p] = std::clamp(logp[p] + delta[p], kLogLo, kLogHi);
                else if (g < 0) trial[p] = std::clamp(logp[p] - delta[p], kLogLo, kLogHi);
                if (trial[p] != logp[p]) any_move = true;
            }
            if (!any_move) break;

            GpModel next;
            double lml_next = -std::numeric_limits<double>::infinity();
            try {
                KernelExpr k = kernel;
                k.set_log_params(trial);
                next = gp_fit(k, x, y, jitter);
                lml_next = gp_log_marginal_likelihood(next);
            } catch (const NumericalFailure&) {
            }

            if (lml_next >= lml) {
                logp = std::move(trial);
                current = std::move(next);
                lml = lml_next;
                prev_grad = applied;
                if (lml > best_lml) {
                    best_lml = lml;
                    best_logp = logp;
                }
            } else {
                double largest = 0.0;
                for (size_t p = 0; p < np; ++p) {
                    delta[p] = std::max(1e-7, delta[p] * 0.5);
                    largest = std::max(largest, delta[p]);
                    prev_grad[p] = 0.0;
                }
                if (largest < 1e-6) break;
            }
        }
    }

    if (!any_success) throw NumericalFailure("all optimizer restarts failed");
    if (best_logp == init) return kernel; // keep the caller's exact values
    KernelExpr out = kernel;
    out.set_log_params(best_logp);
    return out;
}

} // namespace funcmod
