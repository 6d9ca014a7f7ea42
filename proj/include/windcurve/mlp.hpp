#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "windcurve/dataset.hpp"
#include "windcurve/error.hpp"

namespace windcurve {

struct MlpConfig {
    std::vector<int> hidden = {32, 32};
    double learning_rate = 2e-3;  // Adam step size
    int batch_size = 128;
    int max_epochs = 60;
    int patience = 6;  // epochs without hold-out improvement before stopping
    int restarts = 1;  // independent initializations; best hold-out kept
};

// Covariate row for static curve regression: v100, direction as (sin, cos),
// temperature, pressure.
inline constexpr int kMlpFeatures = 5;

inline bool mlp_feature_row(const AlignedDataset& ds, std::size_t r, double* out) {
    const double dir = ds.direction_deg[r] * std::numbers::pi / 180.0;
    out[0] = ds.v100_ms[r];
    out[1] = std::sin(dir);
    out[2] = std::cos(dir);
    out[3] = ds.temperature_c[r];
    out[4] = ds.pressure_hpa[r];
    for (int i = 0; i < kMlpFeatures; ++i)
        if (!std::isfinite(out[i])) return false;
    return true;
}

// Feature matrix (rows x kMlpFeatures) and targets for rows with complete data.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> mlp_design(const AlignedDataset& ds,
                                                              std::span<const std::size_t> rows) {
    std::vector<std::size_t> ok;
    double buf[kMlpFeatures];
    for (auto r : rows)
        if (mlp_feature_row(ds, r, buf) && !is_missing(ds.power_kw[r])) ok.push_back(r);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(ok.size()), kMlpFeatures);
    Eigen::VectorXd y(static_cast<Eigen::Index>(ok.size()));
    for (std::size_t i = 0; i < ok.size(); ++i) {
        mlp_feature_row(ds, ok[i], buf);
        for (int c = 0; c < kMlpFeatures; ++c) X(static_cast<Eigen::Index>(i), c) = buf[c];
        y(static_cast<Eigen::Index>(i)) = ds.power_kw[ok[i]];
    }
    return {std::move(X), std::move(y)};
}

// Fully connected tanh network with a linear output unit. Inputs and target
// are standardized with constants taken from the training rows.
class MlpRegressor {
public:
    struct Gradient {
        std::vector<Eigen::MatrixXd> dW;
        std::vector<Eigen::VectorXd> db;
    };

    MlpRegressor() = default;

    MlpRegressor(int inputs, const std::vector<int>& hidden, std::uint64_t seed) {
        std::vector<int> sizes{inputs};
        sizes.insert(sizes.end(), hidden.begin(), hidden.end());
        sizes.push_back(1);
        std::mt19937_64 rng(seed);
        for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
            const double limit = std::sqrt(6.0 / (sizes[l] + sizes[l + 1]));
            std::uniform_real_distribution<double> u(-limit, limit);
            Eigen::MatrixXd W(sizes[l + 1], sizes[l]);
            for (Eigen::Index i = 0; i < W.size(); ++i) W.data()[i] = u(rng);
            W_.push_back(std::move(W));
            b_.push_back(Eigen::VectorXd::Zero(sizes[l + 1]));
        }
        x_mean_ = Eigen::VectorXd::Zero(inputs);
        x_scale_ = Eigen::VectorXd::Ones(inputs);
    }

    int inputs() const { return W_.empty() ? 0 : static_cast<int>(W_.front().cols()); }
    std::size_t layers() const { return W_.size(); }
    std::vector<Eigen::MatrixXd>& weights() { return W_; }
    std::vector<Eigen::VectorXd>& biases() { return b_; }
    const std::vector<Eigen::MatrixXd>& weights() const { return W_; }
    const std::vector<Eigen::VectorXd>& biases() const { return b_; }

    void set_standardization(Eigen::VectorXd x_mean, Eigen::VectorXd x_scale, double y_mean,
                             double y_scale) {
        x_mean_ = std::move(x_mean);
        x_scale_ = std::move(x_scale);
        y_mean_ = y_mean;
        y_scale_ = y_scale;
    }

    // Columns are samples.
    Eigen::MatrixXd standardize_inputs(const Eigen::MatrixXd& X) const {
        Eigen::MatrixXd Z = X.transpose();
        Z.colwise() -= x_mean_;
        Z.array().colwise() /= x_scale_.array();
        return Z;
    }

    Eigen::VectorXd standardize_target(const Eigen::VectorXd& y) const {
        return (y.array() - y_mean_) / y_scale_;
    }

    // Network output in standardized units; Z has one sample per column.
    Eigen::RowVectorXd forward(const Eigen::MatrixXd& Z) const {
        Eigen::MatrixXd a = Z;
        for (std::size_t l = 0; l < W_.size(); ++l) {
            Eigen::MatrixXd h = W_[l] * a;
            h.colwise() += b_[l];
            a = l + 1 < W_.size() ? Eigen::MatrixXd(h.array().tanh()) : h;
        }
        return a.row(0);
    }

    // Mean squared error over the columns of Z and its gradient.
    double loss_and_gradient(const Eigen::MatrixXd& Z, const Eigen::VectorXd& t, Gradient& g) const {
        const auto L = W_.size();
        const double n = static_cast<double>(Z.cols());
        std::vector<Eigen::MatrixXd> acts(L + 1);
        acts[0] = Z;
        for (std::size_t l = 0; l < L; ++l) {
            Eigen::MatrixXd h = W_[l] * acts[l];
            h.colwise() += b_[l];
            acts[l + 1] = l + 1 < L ? Eigen::MatrixXd(h.array().tanh()) : h;
        }
        const Eigen::RowVectorXd err = acts[L].row(0) - t.transpose();
        const double loss = err.squaredNorm() / n;
        g.dW.resize(L);
        g.db.resize(L);
        Eigen::MatrixXd delta = (2.0 / n) * err;
        for (std::size_t l = L; l-- > 0;) {
            g.dW[l] = delta * acts[l].transpose();
            g.db[l] = delta.rowwise().sum();
            if (l > 0) {
                delta = (W_[l].transpose() * delta).cwiseProduct(
                    Eigen::MatrixXd(1.0 - acts[l].array().square()));
            }
        }
        return loss;
    }

    double loss(const Eigen::MatrixXd& Z, const Eigen::VectorXd& t) const {
        return (forward(Z) - t.transpose()).squaredNorm() / static_cast<double>(Z.cols());
    }

    // Predictions in kW for raw feature rows.
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const {
        if (X.cols() != inputs()) throw ParameterError("feature schema mismatch");
        const Eigen::RowVectorXd out = forward(standardize_inputs(X));
        return (out.transpose().array() * y_scale_ + y_mean_).matrix();
    }

    nlohmann::json to_json() const {
        nlohmann::json layers = nlohmann::json::array();
        for (std::size_t l = 0; l < W_.size(); ++l) {
            std::vector<double> w(W_[l].data(), W_[l].data() + W_[l].size());
            std::vector<double> b(b_[l].data(), b_[l].data() + b_[l].size());
            layers.push_back({{"rows", W_[l].rows()}, {"cols", W_[l].cols()}, {"weights_colmajor", w}, {"bias", b}});
        }
        return {{"layers", layers},
                {"x_mean", std::vector<double>(x_mean_.data(), x_mean_.data() + x_mean_.size())},
                {"x_scale", std::vector<double>(x_scale_.data(), x_scale_.data() + x_scale_.size())},
                {"y_mean", y_mean_},
                {"y_scale", y_scale_}};
    }

    static MlpRegressor from_json(const nlohmann::json& j) {
        MlpRegressor m;
        try {
            for (const auto& layer : j.at("layers")) {
                const auto r = layer.at("rows").get<Eigen::Index>();
                const auto c = layer.at("cols").get<Eigen::Index>();
                const auto w = layer.at("weights_colmajor").get<std::vector<double>>();
                const auto b = layer.at("bias").get<std::vector<double>>();
                if (static_cast<Eigen::Index>(w.size()) != r * c || static_cast<Eigen::Index>(b.size()) != r)
                    throw SchemaError("MLP layer dimensions are inconsistent");
                m.W_.push_back(Eigen::Map<const Eigen::MatrixXd>(w.data(), r, c));
                m.b_.push_back(Eigen::Map<const Eigen::VectorXd>(b.data(), r));
            }
            const auto xm = j.at("x_mean").get<std::vector<double>>();
            const auto xs = j.at("x_scale").get<std::vector<double>>();
            m.x_mean_ = Eigen::Map<const Eigen::VectorXd>(xm.data(), static_cast<Eigen::Index>(xm.size()));
            m.x_scale_ = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
            m.y_mean_ = j.at("y_mean").get<double>();
            m.y_scale_ = j.at("y_scale").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(std::string("malformed MLP document: ") + e.what());
        }
        if (m.W_.empty() || m.x_mean_.size() != m.inputs() || m.x_scale_.size() != m.inputs())
            throw SchemaError("MLP document has an inconsistent feature schema");
        return m;
    }

private:
    std::vector<Eigen::MatrixXd> W_;
    std::vector<Eigen::VectorXd> b_;
    Eigen::VectorXd x_mean_;
    Eigen::VectorXd x_scale_;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
};

struct MlpFitReport {
    double best_holdout_loss = std::numeric_limits<double>::infinity();  // standardized units
    int epochs = 0;
    int best_restart = 0;
};

namespace detail {

inline std::pair<double, double> mean_scale(const Eigen::VectorXd& v) {
    const double mean = v.mean();
    const double sd = std::sqrt((v.array() - mean).square().mean());
    return {mean, sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0};
}

}  // namespace detail

// Mini-batch Adam with a fixed step size. Training stops after `patience`
// epochs without hold-out improvement and the best hold-out parameters are
// kept; with several restarts the restart with the lowest hold-out loss wins.
inline MlpRegressor fit_mlp(const Eigen::MatrixXd& X_train, const Eigen::VectorXd& y_train,
                            const Eigen::MatrixXd& X_holdout, const Eigen::VectorXd& y_holdout,
                            const MlpConfig& cfg, std::uint64_t seed, MlpFitReport* report = nullptr) {
    if (X_train.rows() < 1 || X_holdout.rows() < 1)
        throw TrainingError("MLP training needs at least one training and one hold-out row");
    if (X_train.cols() != X_holdout.cols() || X_train.rows() != y_train.size() ||
        X_holdout.rows() != y_holdout.size())
        throw MisalignedError("MLP design matrices are inconsistent");
    if (cfg.batch_size < 1 || cfg.max_epochs < 1 || cfg.restarts < 1 || !(cfg.learning_rate > 0))
        throw ParameterError("invalid MLP training configuration");

    const auto features = static_cast<int>(X_train.cols());
    Eigen::VectorXd x_mean(features), x_scale(features);
    for (int c = 0; c < features; ++c) {
        const auto [m, s] = detail::mean_scale(X_train.col(c));
        x_mean(c) = m;
        x_scale(c) = s;
    }
    const auto [y_mean, y_scale] = detail::mean_scale(y_train);

    MlpRegressor best;
    MlpFitReport best_report;
    for (int restart = 0; restart < cfg.restarts; ++restart) {
        std::seed_seq seq{seed, static_cast<std::uint64_t>(restart)};
        std::uint64_t init_seed = 0;
        {
            std::array<std::uint32_t, 2> s{};
            seq.generate(s.begin(), s.end());
            init_seed = (std::uint64_t{s[0]} << 32) | s[1];
        }
        MlpRegressor net(features, cfg.hidden, init_seed);
        net.set_standardization(x_mean, x_scale, y_mean, y_scale);
        const Eigen::MatrixXd Z = net.standardize_inputs(X_train);
        const Eigen::VectorXd t = net.standardize_target(y_train);
        const Eigen::MatrixXd Zh = net.standardize_inputs(X_holdout);
        const Eigen::VectorXd th = net.standardize_target(y_holdout);

        // Adam state
        std::vector<Eigen::MatrixXd> mW, vW;
        std::vector<Eigen::VectorXd> mb, vb;
        for (std::size_t l = 0; l < net.layers(); ++l) {
            mW.push_back(Eigen::MatrixXd::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
            vW.push_back(mW.back());
            mb.push_back(Eigen::VectorXd::Zero(net.biases()[l].size()));
            vb.push_back(mb.back());
        }
        constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
        long step = 0;

        std::mt19937_64 rng(init_seed ^ 0x9e3779b97f4a7c15ULL);
        std::vector<Eigen::Index> order(static_cast<std::size_t>(Z.cols()));
        std::iota(order.begin(), order.end(), Eigen::Index{0});

        MlpRegressor best_here = net;
        double best_loss = net.loss(Zh, th);
        int since_best = 0;
        int epoch = 0;
        MlpRegressor::Gradient g;
        for (epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
            std::shuffle(order.begin(), order.end(), rng);
            for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
                const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
                std::vector<Eigen::Index> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                              order.begin() + static_cast<std::ptrdiff_t>(stop));
                const Eigen::MatrixXd Zb = Z(Eigen::all, idx);
                const Eigen::VectorXd tb = t(idx);
                const double l = net.loss_and_gradient(Zb, tb, g);
                if (!std::isfinite(l))
                    throw TrainingError("non-finite MLP loss at epoch " + std::to_string(epoch) +
                                        ", restart " + std::to_string(restart) +
                                        " (learning rate " + std::to_string(cfg.learning_rate) + ")");
                ++step;
                const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
                const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
                for (std::size_t k = 0; k < net.layers(); ++k) {
                    mW[k] = beta1 * mW[k] + (1 - beta1) * g.dW[k];
                    vW[k] = beta2 * vW[k] + (1 - beta2) * g.dW[k].cwiseAbs2();
                    mb[k] = beta1 * mb[k] + (1 - beta1) * g.db[k];
                    vb[k] = beta2 * vb[k] + (1 - beta2) * g.db[k].cwiseAbs2();
                    net.weights()[k].array() -= cfg.learning_rate * (mW[k].array() / c1) /
                                                ((vW[k].array() / c2).sqrt() + eps);
                    net.biases()[k].array() -= cfg.learning_rate * (mb[k].array() / c1) /
                                               ((vb[k].array() / c2).sqrt() + eps);
                }
            }
            const double hl = net.loss(Zh, th);
            if (!std::isfinite(hl))
                throw TrainingError("non-finite MLP hold-out loss at epoch " + std::to_string(epoch));
            if (hl < best_loss) {
                best_loss = hl;
                best_here = net;
                since_best = 0;
            } else if (++since_best >= cfg.patience) {
                break;
            }
        }
        if (restart == 0 || best_loss < best_report.best_holdout_loss) {
            best = best_here;
            best_report = {best_loss, std::min(epoch, cfg.max_epochs), restart};
        }
    }
    if (report) *report = best_report;
    return best;
}

}  // namespace windcurve
