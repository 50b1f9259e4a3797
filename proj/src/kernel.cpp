#include "funcmod/kernel.hpp"

#include <cctype>
#include <cmath>

#include "funcmod/csv.hpp"
#include "funcmod/errors.hpp"

namespace funcmod {

namespace {

size_t leaf_arity(KernelType t) {
    switch (t) {
    case KernelType::Rbf: return 2;
    case KernelType::ExpSineSquared: return 3;
    case KernelType::RationalQuadratic: return 3;
    case KernelType::WhiteNoise: return 1;
    default: return 0;
    }
}

bool is_leaf(KernelType t) {
    return t != KernelType::Sum && t != KernelType::Product;
}

} // namespace

void KernelExpr::validate() const {
    if (is_leaf(type)) {
        if (!children.empty()) throw InvalidInput("leaf kernel with children");
        if (params.size() != leaf_arity(type)) throw InvalidInput("kernel parameter arity mismatch");
        for (double p : params)
            if (!(p > 0) || !std::isfinite(p)) throw InvalidInput("kernel hyperparameters must be > 0");
    } else {
        if (children.size() != 2) throw InvalidInput("sum/prod take exactly two children");
        if (!params.empty()) throw InvalidInput("sum/prod carry no parameters");
        children[0].validate();
        children[1].validate();
    }
}

size_t KernelExpr::n_params() const {
    if (is_leaf(type)) return params.size();
    return children[0].n_params() + children[1].n_params();
}

size_t KernelExpr::n_leaves() const {
    if (is_leaf(type)) return 1;
    return children[0].n_leaves() + children[1].n_leaves();
}

std::vector<double> KernelExpr::log_params() const {
    std::vector<double> out;
    if (is_leaf(type)) {
        for (double p : params) out.push_back(std::log(p));
    } else {
        for (const auto& c : children) {
            auto sub = c.log_params();
            out.insert(out.end(), sub.begin(), sub.end());
        }
    }
    return out;
}

void KernelExpr::set_log_params(std::span<const double> values) {
    size_t expect = n_params();
    if (values.size() != expect) throw InvalidInput("log-parameter vector arity mismatch");
    size_t pos = 0;
    auto assign = [&](auto&& self, KernelExpr& node) -> void {
        if (is_leaf(node.type)) {
            for (double& p : node.params) p = std::exp(values[pos++]);
        } else {
            self(self, node.children[0]);
            self(self, node.children[1]);
        }
    };
    assign(assign, *this);
}

KernelExpr k_rbf(double v, double l) { return {KernelType::Rbf, {v, l}, {}}; }
KernelExpr k_expsine(double v, double l, double p) { return {KernelType::ExpSineSquared, {v, l, p}, {}}; }
KernelExpr k_ratquad(double v, double l, double a) { return {KernelType::RationalQuadratic, {v, l, a}, {}}; }
KernelExpr k_white(double v) { return {KernelType::WhiteNoise, {v}, {}}; }
KernelExpr k_sum(KernelExpr a, KernelExpr b) {
    return {KernelType::Sum, {}, {std::move(a), std::move(b)}};
}
KernelExpr k_prod(KernelExpr a, KernelExpr b) {
    return {KernelType::Product, {}, {std::move(a), std::move(b)}};
}

namespace {

// Evaluates the node; when grad is non-null, writes partials w.r.t. each leaf
// log-hyperparameter at offset `pos` and advances it.
double eval_node(const KernelExpr& k, double x, double xp, double* grad, size_t& pos) {
    double d = x - xp;
    switch (k.type) {
    case KernelType::Rbf: {
        double v = k.params[0], l = k.params[1];
        double val = v * std::exp(-d * d / (2.0 * l * l));
        if (grad) {
            grad[pos] = val;
            grad[pos + 1] = val * d * d / (l * l);
        }
        pos += 2;
        return val;
    }
    case KernelType::ExpSineSquared: {
        double v = k.params[0], l = k.params[1], p = k.params[2];
        double u = M_PI * d / p;
        double s = std::sin(u);
        double val = v * std::exp(-2.0 * s * s / (l * l));
        if (grad) {
            grad[pos] = val;
            grad[pos + 1] = val * 4.0 * s * s / (l * l);
            grad[pos + 2] = val * (2.0 * M_PI * d / (l * l * p)) * std::sin(2.0 * u);
        }
        pos += 3;
        return val;
    }
    case KernelType::RationalQuadratic: {
        double v = k.params[0], l = k.params[1], a = k.params[2];
        double base = 1.0 + d * d / (2.0 * a * l * l);
        double val = v * std::pow(base, -a);
        if (grad) {
            grad[pos] = val;
            grad[pos + 1] = val * d * d / (l * l * base);
            grad[pos + 2] = val * a * (-std::log(base) + (base - 1.0) / base);
        }
        pos += 3;
        return val;
    }
    case KernelType::WhiteNoise: {
        double val = (x == xp) ? k.params[0] : 0.0;
        if (grad) grad[pos] = val;
        pos += 1;
        return val;
    }
    case KernelType::Sum: {
        double left = eval_node(k.children[0], x, xp, grad, pos);
        double right = eval_node(k.children[1], x, xp, grad, pos);
        return left + right;
    }
    case KernelType::Product: {
        size_t left_start = pos;
        double left = eval_node(k.children[0], x, xp, grad, pos);
        size_t right_start = pos;
        double right = eval_node(k.children[1], x, xp, grad, pos);
        if (grad) {
            for (size_t i = left_start; i < right_start; ++i) grad[i] *= right;
            for (size_t i = right_start; i < pos; ++i) grad[i] *= left;
        }
        return left * right;
    }
    }
    throw InvalidInput("unknown kernel node");
}

} // namespace

double kernel_eval(const KernelExpr& k, double x, double xp) {
    size_t pos = 0;
    return eval_node(k, x, xp, nullptr, pos);
}

double kernel_eval_grad(const KernelExpr& k, double x, double xp, std::span<double> grad) {
    if (grad.size() != k.n_params()) throw InvalidInput("gradient span arity mismatch");
    size_t pos = 0;
    return eval_node(k, x, xp, grad.data(), pos);
}

// ---------------------------------------------------------------------------
// Text form

namespace {

const char* type_name(KernelType t) {
    switch (t) {
    case KernelType::Rbf: return "rbf";
    case KernelType::ExpSineSquared: return "expsine";
    case KernelType::RationalQuadratic: return "ratquad";
    case KernelType::WhiteNoise: return "white";
    case KernelType::Sum: return "sum";
    case KernelType::Product: return "prod";
    }
    return "?";
}

std::vector<const char*> param_keys(KernelType t) {
    switch (t) {
    case KernelType::Rbf: return {"v", "l"};
    case KernelType::ExpSineSquared: return {"v", "l", "p"};
    case KernelType::RationalQuadratic: return {"v", "l", "a"};
    case KernelType::WhiteNoise: return {"v"};
    default: return {};
    }
}

struct Parser {
    std::string_view text;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    void expect(char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c)
            throw KernelParseError("expected '" + std::string(1, c) + "' at offset " +
                                   std::to_string(pos));
        ++pos;
    }
    std::string ident() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        if (pos == start) throw KernelParseError("expected identifier at offset " + std::to_string(pos));
        return std::string(text.substr(start, pos - start));
    }
    double number() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) ||
                                     text[pos] == '+' || text[pos] == '-' || text[pos] == '.' ||
                                     text[pos] == 'e' || text[pos] == 'E'))
            ++pos;
        if (pos == start) throw KernelParseError("expected number at offset " + std::to_string(pos));
        try {
            return parse_double(text.substr(start, pos - start));
        } catch (const InvalidData& e) {
            throw KernelParseError(e.what());
        }
    }

    KernelExpr node() {
        std::string name = ident();
        KernelExpr k;
        if (name == "sum" || name == "prod") {
            k.type = name == "sum" ? KernelType::Sum : KernelType::Product;
            expect('(');
            k.children.push_back(node());
            expect(',');
            k.children.push_back(node());
            expect(')');
            return k;
        }
        if (name == "rbf") k.type = KernelType::Rbf;
        else if (name == "expsine") k.type = KernelType::ExpSineSquared;
        else if (name == "ratquad") k.type = KernelType::RationalQuadratic;
        else if (name == "white") k.type = KernelType::WhiteNoise;
        else throw KernelParseError("unknown kernel '" + name + "'");

        auto keys = param_keys(k.type);
        k.params.resize(keys.size());
        expect('(');
        for (size_t i = 0; i < keys.size(); ++i) {
            if (i > 0) expect(',');
            std::string key = ident();
            if (key != keys[i])
                throw KernelParseError("expected parameter '" + std::string(keys[i]) + "', got '" +
                                       key + "'");
            expect('=');
            k.params[i] = number();
        }
        expect(')');
        return k;
    }
};

} // namespace

std::string kernel_to_string(const KernelExpr& k) {
    std::string out = type_name(k.type);
    out += '(';
    if (is_leaf(k.type)) {
        auto keys = param_keys(k.type);
        for (size_t i = 0; i < keys.size(); ++i) {
            if (i > 0) out += ',';
            out += keys[i];
            out += '=';
            out += format_double(k.params[i]);
        }
    } else {
        out += kernel_to_string(k.children[0]);
        out += ',';
        out += kernel_to_string(k.children[1]);
    }
    out += ')';
    return out;
}

KernelExpr parse_kernel(std::string_view text) {
    Parser p{text};
    KernelExpr k = p.node();
    p.skip_ws();
    if (p.pos != text.size())
        throw KernelParseError("trailing characters at offset " + std::to_string(p.pos));
    try {
        k.validate();
    } catch (const InvalidInput& e) {
        throw KernelParseError(e.what());
    }
    return k;
}

// ---------------------------------------------------------------------------
// Stock kernels (time in fractional years)

KernelExpr make_llm_kernel() {
    return k_sum(k_sum(k_rbf(40.0, 40.0), k_expsine(4.0, 1.5, 1.0)),
                 k_sum(k_ratquad(1.0, 1.0, 1.0), k_white(0.05)));
}

KernelExpr make_expert_kernel() {
    KernelExpr long_term = k_rbf(66.0 * 66.0, 67.0);
    KernelExpr seasonal = k_prod(k_rbf(2.4 * 2.4, 90.0), k_expsine(1.0, 1.3, 1.0));
    KernelExpr medium = k_ratquad(0.66 * 0.66, 1.2, 0.78);
    KernelExpr noise = k_sum(k_rbf(0.18 * 0.18, 1.6), k_white(0.19 * 0.19));
    return k_sum(k_sum(long_term, seasonal), k_sum(medium, noise));
}

} // namespace funcmod
