#include "funcmod/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "funcmod/errors.hpp"
#include "funcmod/rng.hpp"

namespace funcmod {

void MlpConfig::validate() const {
    if (layer_sizes.size() < 2) throw InvalidInput("need at least input and output layers");
    for (size_t s : layer_sizes)
        if (s == 0) throw InvalidInput("layer sizes must be positive");
    if (layer_sizes.back() != 1) throw InvalidInput("single-output networks only");
    if (batch_size == 0) throw InvalidInput("batch_size must be positive");
    if (learning_rate <= 0) throw InvalidInput("learning_rate must be positive");
}

namespace {

double activate(double z, Activation a) {
    return a == Activation::Relu ? (z > 0 ? z : 0.0) : std::tanh(z);
}

// derivative expressed through the activated value
double activate_deriv(double act, Activation a) {
    return a == Activation::Relu ? (act > 0 ? 1.0 : 0.0) : 1.0 - act * act;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct BatchWorkspace {
    // acts[l]: bn x layer_sizes[l], row-major; acts[0] is the input
    std::vector<std::vector<double>> acts;
    std::vector<std::vector<double>> delta; // dL/dz per layer output
};

// Forward pass for rows X[idx[0..bn)]; returns output column in ws.acts.back().
void forward_batch(const MlpModel& m, const std::vector<std::vector<double>>& X,
                   const std::vector<size_t>& idx, size_t start, size_t bn, BatchWorkspace& ws) {
    const auto& sizes = m.config.layer_sizes;
    size_t L = sizes.size() - 1;
    ws.acts.resize(L + 1);
    ws.acts[0].resize(bn * sizes[0]);
    for (size_t b = 0; b < bn; ++b)
        std::copy(X[idx[start + b]].begin(), X[idx[start + b]].end(),
                  ws.acts[0].begin() + static_cast<long>(b * sizes[0]));

    for (size_t l = 0; l < L; ++l) {
        size_t in = sizes[l], out = sizes[l + 1];
        ws.acts[l + 1].assign(bn * out, 0.0);
        const double* W = m.weights[l].data();
        const double* bias = m.biases[l].data();
        double* Z = ws.acts[l + 1].data();
        const double* A = ws.acts[l].data();
        for (size_t b = 0; b < bn; ++b) {
            double* zrow = Z + b * out;
            std::copy(bias, bias + out, zrow);
            const double* arow = A + b * in;
            for (size_t i = 0; i < in; ++i) {
                double a = arow[i];
                if (a == 0.0) continue;
                const double* wrow = W + i * out;
                for (size_t o = 0; o < out; ++o) zrow[o] += a * wrow[o];
            }
            if (l + 1 < L)
                for (size_t o = 0; o < out; ++o) zrow[o] = activate(zrow[o], m.config.activation);
        }
    }
}

// Loss over the batch plus mean gradients; gW/gb must be zero-filled with the
// same shapes as the model weights.
double backward_batch(const MlpModel& m, const std::vector<double>& y,
                      const std::vector<size_t>& idx, size_t start, size_t bn, BatchWorkspace& ws,
                      std::vector<std::vector<double>>& gW, std::vector<std::vector<double>>& gb) {
    const auto& sizes = m.config.layer_sizes;
    size_t L = sizes.size() - 1;
    double inv_bn = 1.0 / static_cast<double>(bn);

    ws.delta.resize(L);
    ws.delta[L - 1].resize(bn);
    double loss = 0.0;
    for (size_t b = 0; b < bn; ++b) {
        double o = ws.acts[L][b];
        double t = y[idx[start + b]];
        if (m.config.task == MlpTask::Regression) {
            double diff = o - t;
            loss += diff * diff;
            ws.delta[L - 1][b] = 2.0 * diff * inv_bn;
        } else {
            double p = sigmoid(o);
            constexpr double eps = 1e-12;
            loss += -(t * std::log(p + eps) + (1.0 - t) * std::log(1.0 - p + eps));
            ws.delta[L - 1][b] = (p - t) * inv_bn;
        }
    }
    loss *= inv_bn;

    for (size_t l = L; l-- > 0;) {
        size_t in = sizes[l], out = sizes[l + 1];
        const double* A = ws.acts[l].data();
        const double* D = ws.delta[l].data();
        double* gw = gW[l].data();
        double* gbv = gb[l].data();
        for (size_t b = 0; b < bn; ++b) {
            const double* arow = A + b * in;
            const double* drow = D + b * out;
            for (size_t o = 0; o < out; ++o) gbv[o] += drow[o];
            for (size_t i = 0; i < in; ++i) {
                double a = arow[i];
                if (a == 0.0) continue;
                double* grow = gw + i * out;
                for (size_t o = 0; o < out; ++o) grow[o] += a * drow[o];
            }
        }
        if (l == 0) break;

        // propagate to the previous layer, through the activation
        auto& dprev = ws.delta[l - 1];
        dprev.assign(bn * in, 0.0);
        const double* W = m.weights[l].data();
        for (size_t b = 0; b < bn; ++b) {
            const double* drow = D + b * out;
            const double* arow = A + b * in;
            double* prow = dprev.data() + b * in;
            for (size_t i = 0; i < in; ++i) {
                const double* wrow = W + i * out;
                double s = 0.0;
                for (size_t o = 0; o < out; ++o) s += wrow[o] * drow[o];
                prow[i] = s * activate_deriv(arow[i], m.config.activation);
            }
        }
    }
    return loss;
}

} // namespace

std::vector<double> MlpModel::forward(std::span<const double> x) const {
    const auto& sizes = config.layer_sizes;
    if (x.size() != sizes[0]) throw InvalidInput("input arity mismatch");
    size_t L = sizes.size() - 1;
    std::vector<double> cur(x.begin(), x.end()), next;
    for (size_t l = 0; l < L; ++l) {
        size_t in = sizes[l], out = sizes[l + 1];
        next.assign(biases[l].begin(), biases[l].end());
        for (size_t i = 0; i < in; ++i) {
            double a = cur[i];
            if (a == 0.0) continue;
            const double* wrow = weights[l].data() + i * out;
            for (size_t o = 0; o < out; ++o) next[o] += a * wrow[o];
        }
        if (l + 1 < L)
            for (double& v : next) v = activate(v, config.activation);
        cur.swap(next);
    }
    return cur;
}

double MlpModel::predict_proba(std::span<const double> x) const {
    if (config.task != MlpTask::BinaryClassification)
        throw InvalidInput("predict_proba on a regression model");
    return sigmoid(forward(x)[0]);
}

size_t MlpModel::n_parameters() const {
    size_t n = 0;
    for (const auto& w : weights) n += w.size();
    for (const auto& b : biases) n += b.size();
    return n;
}

MlpModel init_mlp(const MlpConfig& config) {
    config.validate();
    MlpModel m;
    m.config = config;
    size_t L = config.layer_sizes.size() - 1;
    Rng rng = Rng(config.seed).split("mlp-init");
    for (size_t l = 0; l < L; ++l) {
        size_t in = config.layer_sizes[l], out = config.layer_sizes[l + 1];
        double scale = config.activation == Activation::Relu
                           ? std::sqrt(2.0 / static_cast<double>(in))
                           : std::sqrt(1.0 / static_cast<double>(in));
        Rng stream = rng.split(l);
        std::vector<double> w(in * out);
        for (size_t i = 0; i < w.size(); ++i) w[i] = scale * stream.normal(i);
        m.weights.push_back(std::move(w));
        m.biases.emplace_back(out, 0.0);
    }
    return m;
}

MlpTrainResult mlp_train(const MlpConfig& config, const std::vector<std::vector<double>>& X,
                         const std::vector<double>& y) {
    config.validate();
    if (X.size() != y.size() || X.empty()) throw InvalidInput("bad training data shape");
    for (const auto& row : X)
        if (row.size() != config.layer_sizes[0]) throw InvalidInput("feature arity mismatch");
    if (config.task == MlpTask::BinaryClassification)
        for (double t : y)
            if (t != 0.0 && t != 1.0) throw InvalidInput("classification targets must be 0/1");

    MlpTrainResult result;
    result.model = init_mlp(config);
    MlpModel& m = result.model;
    size_t n = X.size();
    size_t L = config.layer_sizes.size() - 1;

    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;

    std::vector<std::vector<double>> gW(L), gb(L);
    for (size_t l = 0; l < L; ++l) {
        gW[l].resize(m.weights[l].size());
        gb[l].resize(m.biases[l].size());
    }
    BatchWorkspace ws;
    Rng shuffle_rng = Rng(config.seed).split("mlp-shuffle");

    for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
        RngSequence rs(shuffle_rng.split(epoch));
        shuffle(order, rs);
        double epoch_loss = 0.0;
        for (size_t start = 0; start < n; start += config.batch_size) {
            size_t bn = std::min(config.batch_size, n - start);
            forward_batch(m, X, order, start, bn, ws);
            for (size_t l = 0; l < L; ++l) {
                std::fill(gW[l].begin(), gW[l].end(), 0.0);
                std::fill(gb[l].begin(), gb[l].end(), 0.0);
            }
            double loss = backward_batch(m, y, order, start, bn, ws, gW, gb);
            epoch_loss += loss * static_cast<double>(bn);
            for (size_t l = 0; l < L; ++l) {
                double* w = m.weights[l].data();
                const double* g = gW[l].data();
                for (size_t i = 0; i < gW[l].size(); ++i) w[i] -= config.learning_rate * g[i];
                double* b = m.biases[l].data();
                const double* gbp = gb[l].data();
                for (size_t i = 0; i < gb[l].size(); ++i) b[i] -= config.learning_rate * gbp[i];
            }
        }
        epoch_loss /= static_cast<double>(n);
        if (!std::isfinite(epoch_loss))
            throw DivergenceError("training loss diverged at epoch " + std::to_string(epoch), epoch);
        result.loss_trace.push_back(epoch_loss);
    }
    return result;
}

double mlp_grad_check(const MlpConfig& config, const std::vector<std::vector<double>>& X,
                      const std::vector<double>& y, double step) {
    config.validate();
    MlpModel m = init_mlp(config);
    size_t n = X.size();
    size_t L = config.layer_sizes.size() - 1;

    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;

    std::vector<std::vector<double>> gW(L), gb(L);
    for (size_t l = 0; l < L; ++l) {
        gW[l].resize(m.weights[l].size());
        gb[l].resize(m.biases[l].size());
    }
    BatchWorkspace ws;
    forward_batch(m, X, idx, 0, n, ws);
    backward_batch(m, y, idx, 0, n, ws, gW, gb);

    auto loss_at = [&]() {
        BatchWorkspace w2;
        forward_batch(m, X, idx, 0, n, w2);
        std::vector<std::vector<double>> dW(L), db(L);
        for (size_t l = 0; l < L; ++l) {
            dW[l].resize(m.weights[l].size());
            db[l].resize(m.biases[l].size());
        }
        return backward_batch(m, y, idx, 0, n, w2, dW, db);
    };

    double worst = 0.0;
    auto check_param = [&](double& p, double analytic) {
        double keep = p;
        p = keep + step;
        double hi = loss_at();
        p = keep - step;
        double lo = loss_at();
        p = keep;
        double numeric = (hi - lo) / (2.0 * step);
        double rel = std::abs(analytic - numeric) /
                     std::max({1.0, std::abs(analytic), std::abs(numeric)});
        worst = std::max(worst, rel);
    };

    for (size_t l = 0; l < L; ++l) {
        for (size_t i = 0; i < m.weights[l].size(); ++i) check_param(m.weights[l][i], gW[l][i]);
        for (size_t i = 0; i < m.biases[l].size(); ++i) check_param(m.biases[l][i], gb[l][i]);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Persistence: text header, then the raw little-endian doubles of every
// weight matrix and bias vector in layer order.

void MlpModel::save(const std::string& path) const {
    std::ostringstream header;
    header << "FUNCMOD-MLP 1\n";
    header << "layers";
    for (size_t s : config.layer_sizes) header << ' ' << s;
    header << '\n';
    header << "activation " << (config.activation == Activation::Relu ? "relu" : "tanh") << '\n';
    header << "task "
           << (config.task == MlpTask::Regression ? "regression" : "binary_classification") << '\n';
    header << "doubles " << n_parameters() << '\n';

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << header.str();
    auto dump = [&](const std::vector<double>& v) {
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * sizeof(double)));
    };
    for (size_t l = 0; l < weights.size(); ++l) {
        dump(weights[l]);
        dump(biases[l]);
    }
    if (!out) throw IoError("short write to " + path);
}

MlpModel load_mlp_header(std::istream& in, MlpConfig& config) {
    std::string line;
    if (!std::getline(in, line) || line != "FUNCMOD-MLP 1") throw IoError("bad model magic");
    if (!std::getline(in, line) || line.rfind("layers ", 0) != 0) throw IoError("bad layers line");
    {
        std::istringstream ss(line.substr(7));
        size_t v;
        while (ss >> v) config.layer_sizes.push_back(v);
    }
    if (!std::getline(in, line) || line.rfind("activation ", 0) != 0) throw IoError("bad activation line");
    config.activation = line.substr(11) == "tanh" ? Activation::Tanh : Activation::Relu;
    if (!std::getline(in, line) || line.rfind("task ", 0) != 0) throw IoError("bad task line");
    config.task = line.substr(5) == "regression" ? MlpTask::Regression : MlpTask::BinaryClassification;
    if (!std::getline(in, line) || line.rfind("doubles ", 0) != 0) throw IoError("bad doubles line");
    MlpModel m;
    m.config = config;
    return m;
}

MlpModel MlpModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    MlpConfig config;
    MlpModel m = load_mlp_header(in, config);
    size_t L = config.layer_sizes.size() - 1;
    auto slurp = [&](std::vector<double>& v, size_t count) {
        v.resize(count);
        in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(double)));
        if (!in) throw IoError("truncated model file " + path);
    };
    for (size_t l = 0; l < L; ++l) {
        std::vector<double> w, b;
        slurp(w, config.layer_sizes[l] * config.layer_sizes[l + 1]);
        slurp(b, config.layer_sizes[l + 1]);
        m.weights.push_back(std::move(w));
        m.biases.push_back(std::move(b));
    }
    return m;
}

} // namespace funcmod
