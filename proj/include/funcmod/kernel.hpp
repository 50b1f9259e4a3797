#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace funcmod {

enum class KernelType { Rbf, ExpSineSquared, RationalQuadratic, WhiteNoise, Sum, Product };

// Composable covariance expression over scalar inputs.
//
// Leaf closed forms (d = x - x'):
//   rbf(v,l)        v * exp(-d^2 / (2 l^2))
//   expsine(v,l,p)  v * exp(-2 sin^2(pi |d| / p) / l^2)
//   ratquad(v,l,a)  v * (1 + d^2 / (2 a l^2))^(-a)
//   white(v)        v * 1[x == x']
// sum/prod compose pointwise and take exactly two children.
struct KernelExpr {
    KernelType type = KernelType::Rbf;
    std::vector<double> params;      // leaf hyperparameters (see above)
    std::vector<KernelExpr> children;

    void validate() const;           // hyperparameters > 0, arity checks
    size_t n_params() const;         // total leaf hyperparameters in the tree
    size_t n_leaves() const;
    std::vector<double> log_params() const;
    void set_log_params(std::span<const double> values);
};

KernelExpr k_rbf(double v, double l);
KernelExpr k_expsine(double v, double l, double p);
KernelExpr k_ratquad(double v, double l, double a);
KernelExpr k_white(double v);
KernelExpr k_sum(KernelExpr a, KernelExpr b);
KernelExpr k_prod(KernelExpr a, KernelExpr b);

double kernel_eval(const KernelExpr& k, double x, double xp);

// Value plus partial derivatives w.r.t. each leaf log-hyperparameter, in
// log_params() order. grad.size() must equal k.n_params().
double kernel_eval_grad(const KernelExpr& k, double x, double xp, std::span<double> grad);

// Prefix text form, e.g. sum(rbf(v=66,l=67),prod(rbf(v=2,l=90),expsine(v=1,l=1.3,p=1))).
// Numbers are printed in shortest round-trip form so parse/print is exact.
std::string kernel_to_string(const KernelExpr& k);
KernelExpr parse_kernel(std::string_view text); // throws KernelParseError

// The four-term additive kernel used for trend + yearly cycle + short-term
// fluctuations + observation noise, with the period initialized to one year.
KernelExpr make_llm_kernel();

// The classic hand-designed CO2 kernel: long-term RBF, quasi-periodic
// RBF*ExpSineSquared, rational quadratic, and short-scale RBF + white noise.
KernelExpr make_expert_kernel();

} // namespace funcmod
