#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "funcmod/kernel.hpp"

namespace funcmod {

struct GpModel {
    KernelExpr kernel;
    std::vector<double> train_x;
    std::vector<double> train_y;     // centered
    double y_mean = 0.0;
    std::vector<double> chol;        // lower Cholesky factor of K + jitter*I, row-major n x n
    std::vector<double> alpha;       // (K + jitter*I)^-1 y
    double jitter = 1e-8;            // jitter actually used after escalation
    int jitter_escalations = 0;
};

// Builds the gram matrix over train_x, factorizes K + jitter*I and solves for
// alpha. On factorization failure the jitter escalates x10 up to 1e-2 (the
// escalation count is recorded); persistent failure raises NumericalFailure.
GpModel gp_fit(const KernelExpr& kernel, std::span<const double> x, std::span<const double> y,
               double jitter = 1e-8);

struct GpPrediction {
    double mean = 0.0;
    double variance = 0.0;
};

struct GpPredictions {
    std::vector<GpPrediction> points;
    int clamped_negative_variance = 0; // pre-clamp negatives encountered
};

GpPredictions gp_predict(const GpModel& model, std::span<const double> query_x);

// -1/2 y^T alpha - sum(log diag L) - n/2 log(2 pi), on the centered targets.
double gp_log_marginal_likelihood(const GpModel& model);

// Same value plus the gradient w.r.t. the kernel's log-hyperparameters
// via the trace identity with (alpha alpha^T - K^-1).
double gp_lml_grad(const GpModel& model, std::vector<double>& grad);

// Normalized gradient ascent on the LML over log-hyperparameters with a fixed
// decaying step schedule. Restart 1 starts at `kernel`; later restarts draw
// log-uniform offsets around it. The best evaluated point wins, so the result
// never scores below the initial kernel.
KernelExpr gp_optimize(const KernelExpr& kernel, std::span<const double> x,
                       std::span<const double> y, int restarts, int steps, uint64_t seed,
                       double jitter = 1e-8);

} // namespace funcmod
