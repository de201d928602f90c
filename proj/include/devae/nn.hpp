#ifndef DEVAE_NN_HPP
#define DEVAE_NN_HPP

#include "devae/common.hpp"

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace devae {

// Parameter groups double as the layer map for ordered updates:
// sentence layer = {Embed, Posterior, Decoder}, feature layer = {Flow, Scaler}.
enum class ParamGroup { Embed, Posterior, Decoder, Flow, Scaler, Classifier };

inline const char* group_name(ParamGroup g) {
    switch (g) {
        case ParamGroup::Embed: return "embed";
        case ParamGroup::Posterior: return "posterior";
        case ParamGroup::Decoder: return "decoder";
        case ParamGroup::Flow: return "flow";
        case ParamGroup::Scaler: return "scaler";
        case ParamGroup::Classifier: return "classifier";
    }
    return "?";
}

template <class Real>
struct Parameter {
    std::string name;
    ParamGroup group;
    Mat<Real> value;
    Mat<Real> grad;
    bool trainable = true;

    Parameter(std::string n, ParamGroup g, Eigen::Index rows, Eigen::Index cols)
        : name(std::move(n)), group(g), value(Mat<Real>::Zero(rows, cols)),
          grad(Mat<Real>::Zero(rows, cols)) {}

    void zero_grad() { grad.setZero(); }
};

template <class Real>
using ParamList = std::vector<Parameter<Real>*>;

template <class Real>
void zero_grads(const ParamList<Real>& params) {
    for (auto* p : params) p->zero_grad();
}

// Byte hash of parameter values, used to verify update isolation.
template <class Real>
std::uint64_t params_hash(const ParamList<Real>& params) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto* p : params) {
        h = fnv1a64(p->name, h);
        h = fnv1a64(p->value.data(), sizeof(Real) * static_cast<std::size_t>(p->value.size()), h);
    }
    return h;
}

template <class Real>
std::map<std::string, std::uint64_t> group_hashes(const ParamList<Real>& params) {
    std::map<std::string, ParamList<Real>> by_group;
    for (auto* p : params) by_group[group_name(p->group)].push_back(p);
    std::map<std::string, std::uint64_t> out;
    for (auto& [g, list] : by_group) out[g] = params_hash(list);
    return out;
}

// ---------------------------------------------------------------------------
// Layers. Batch-major: X is B x in, outputs B x out. Backward accumulates
// into Parameter::grad and returns the input gradient.
// ---------------------------------------------------------------------------

template <class Real>
struct Linear {
    Parameter<Real> weight;  // out x in
    Parameter<Real> bias;    // out x 1

    Linear(const std::string& name, ParamGroup g, Eigen::Index in, Eigen::Index out)
        : weight(name + ".w", g, out, in), bias(name + ".b", g, out, 1) {}

    void init(Rng& rng) {
        const Real a = Real(1) / std::sqrt(Real(weight.value.cols()));
        weight.value = rng.uniform_mat<Real>(weight.value.rows(), weight.value.cols(), -a, a);
        bias.value.setZero();
    }

    Eigen::Index in_dim() const { return weight.value.cols(); }
    Eigen::Index out_dim() const { return weight.value.rows(); }

    Mat<Real> forward(const Mat<Real>& x) const {
        Mat<Real> y = x * weight.value.transpose();
        y.rowwise() += bias.value.col(0).transpose();
        return y;
    }

    // dY is B x out; x must be the forward input. Returns dX.
    Mat<Real> backward(const Mat<Real>& x, const Mat<Real>& dy) {
        weight.grad.noalias() += dy.transpose() * x;
        bias.grad.col(0).noalias() += dy.colwise().sum().transpose();
        return dy * weight.value;
    }

    void collect(ParamList<Real>& out) {
        out.push_back(&weight);
        out.push_back(&bias);
    }
};

// Feed-forward stack, tanh on all layers except the last.
template <class Real>
struct Mlp {
    std::vector<Linear<Real>> layers;

    struct Cache {
        std::vector<Mat<Real>> inputs;  // input of each layer
        std::vector<Mat<Real>> post;    // post-activation of each hidden layer
    };

    Mlp(const std::string& name, ParamGroup g, const std::vector<Eigen::Index>& dims) {
        for (std::size_t i = 0; i + 1 < dims.size(); ++i)
            layers.emplace_back(name + "." + std::to_string(i), g, dims[i], dims[i + 1]);
    }

    void init(Rng& rng) {
        for (auto& l : layers) l.init(rng);
    }

    Mat<Real> forward(const Mat<Real>& x, Cache* cache = nullptr) const {
        Mat<Real> h = x;
        if (cache) {
            cache->inputs.clear();
            cache->post.clear();
        }
        for (std::size_t i = 0; i < layers.size(); ++i) {
            if (cache) cache->inputs.push_back(h);
            h = layers[i].forward(h);
            if (i + 1 < layers.size()) {
                h = h.array().tanh().matrix();
                if (cache) cache->post.push_back(h);
            }
        }
        return h;
    }

    Mat<Real> backward(const Cache& cache, Mat<Real> dy) {
        for (std::size_t i = layers.size(); i-- > 0;) {
            if (i + 1 < layers.size())
                dy = dy.cwiseProduct((Mat<Real>::Ones(cache.post[i].rows(), cache.post[i].cols()) -
                                      cache.post[i].cwiseProduct(cache.post[i])));
            dy = layers[i].backward(cache.inputs[i], dy);
        }
        return dy;
    }

    void collect(ParamList<Real>& out) {
        for (auto& l : layers) l.collect(out);
    }
};

// Gated recurrent cell:
//   r = sigmoid(x Wr' + h Ur' + br)
//   u = sigmoid(x Wu' + h Uu' + bu)
//   c = tanh(x Wc' + r .* (h Uc') + bc)
//   h' = u .* h + (1 - u) .* c
template <class Real>
struct GruCell {
    Linear<Real> wr, wu, wc;  // input weights (bias lives here)
    Parameter<Real> ur, uu, uc;  // recurrent weights, H x H

    struct StepCache {
        Mat<Real> x, h, r, u, c, h_uc;
    };

    GruCell(const std::string& name, ParamGroup g, Eigen::Index in, Eigen::Index hidden)
        : wr(name + ".wr", g, in, hidden), wu(name + ".wu", g, in, hidden),
          wc(name + ".wc", g, in, hidden), ur(name + ".ur", g, hidden, hidden),
          uu(name + ".uu", g, hidden, hidden), uc(name + ".uc", g, hidden, hidden) {}

    Eigen::Index hidden_dim() const { return ur.value.rows(); }
    Eigen::Index in_dim() const { return wr.in_dim(); }

    void init(Rng& rng) {
        wr.init(rng);
        wu.init(rng);
        wc.init(rng);
        const Real a = Real(1) / std::sqrt(Real(hidden_dim()));
        ur.value = rng.uniform_mat<Real>(hidden_dim(), hidden_dim(), -a, a);
        uu.value = rng.uniform_mat<Real>(hidden_dim(), hidden_dim(), -a, a);
        uc.value = rng.uniform_mat<Real>(hidden_dim(), hidden_dim(), -a, a);
    }

    static Mat<Real> sigmoid(const Mat<Real>& m) {
        return (Real(1) / (Real(1) + (-m.array()).exp())).matrix();
    }

    Mat<Real> step(const Mat<Real>& x, const Mat<Real>& h, StepCache* cache = nullptr) const {
        Mat<Real> r = sigmoid(wr.forward(x) + h * ur.value.transpose());
        Mat<Real> u = sigmoid(wu.forward(x) + h * uu.value.transpose());
        Mat<Real> h_uc = h * uc.value.transpose();
        Mat<Real> c = (wc.forward(x) + r.cwiseProduct(h_uc)).array().tanh().matrix();
        Mat<Real> h_next = u.cwiseProduct(h) + (Mat<Real>::Ones(u.rows(), u.cols()) - u).cwiseProduct(c);
        if (cache) *cache = StepCache{x, h, r, u, c, h_uc};
        return h_next;
    }

    // Returns {dx, dh}; accumulates parameter gradients.
    std::pair<Mat<Real>, Mat<Real>> backward(const StepCache& s, const Mat<Real>& dh_next) {
        const Mat<Real> ones = Mat<Real>::Ones(dh_next.rows(), dh_next.cols());
        Mat<Real> du = dh_next.cwiseProduct(s.h - s.c);
        Mat<Real> dc = dh_next.cwiseProduct(ones - s.u);
        Mat<Real> dh = dh_next.cwiseProduct(s.u);

        Mat<Real> dc_pre = dc.cwiseProduct(ones - s.c.cwiseProduct(s.c));
        Mat<Real> dx = wc.backward(s.x, dc_pre);
        Mat<Real> dr = dc_pre.cwiseProduct(s.h_uc);
        Mat<Real> dh_uc = dc_pre.cwiseProduct(s.r);
        uc.grad.noalias() += dh_uc.transpose() * s.h;
        dh.noalias() += dh_uc * uc.value;

        Mat<Real> du_pre = du.cwiseProduct(s.u).cwiseProduct(ones - s.u);
        dx += wu.backward(s.x, du_pre);
        uu.grad.noalias() += du_pre.transpose() * s.h;
        dh.noalias() += du_pre * uu.value;

        Mat<Real> dr_pre = dr.cwiseProduct(s.r).cwiseProduct(ones - s.r);
        dx += wr.backward(s.x, dr_pre);
        ur.grad.noalias() += dr_pre.transpose() * s.h;
        dh.noalias() += dr_pre * ur.value;

        return {std::move(dx), std::move(dh)};
    }

    void collect(ParamList<Real>& out) {
        wr.collect(out);
        wu.collect(out);
        wc.collect(out);
        out.push_back(&ur);
        out.push_back(&uu);
        out.push_back(&uc);
    }
};

// ---------------------------------------------------------------------------
// Softmax helpers (row-wise, numerically stable).
// ---------------------------------------------------------------------------

template <class Real>
Mat<Real> log_softmax_rows(const Mat<Real>& logits) {
    Mat<Real> out(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const Real m = logits.row(i).maxCoeff();
        const Real lse = m + std::log((logits.row(i).array() - m).exp().sum());
        out.row(i) = logits.row(i).array() - lse;
    }
    return out;
}

template <class Real>
Mat<Real> softmax_rows(const Mat<Real>& logits) {
    return log_softmax_rows(logits).array().exp().matrix();
}

// ---------------------------------------------------------------------------
// Optimizers. Both take a per-step set of active groups so ordered updates
// touch only the parameters they name. Gradients are clipped by global norm
// over the active set.
// ---------------------------------------------------------------------------

template <class Real>
struct OptimizerBase {
    Real lr;
    Real clip_norm;  // <= 0 disables clipping

    explicit OptimizerBase(Real lr_, Real clip = 0) : lr(lr_), clip_norm(clip) {}
    virtual ~OptimizerBase() = default;

    bool active(const Parameter<Real>& p, const std::vector<ParamGroup>& groups) const {
        if (!p.trainable) return false;
        for (auto g : groups)
            if (g == p.group) return true;
        return false;
    }

    Real clip_scale(const ParamList<Real>& params, const std::vector<ParamGroup>& groups) const {
        if (clip_norm <= Real(0)) return Real(1);
        Real sq = 0;
        for (auto* p : params)
            if (active(*p, groups)) sq += p->grad.squaredNorm();
        const Real norm = std::sqrt(sq);
        return norm > clip_norm ? clip_norm / norm : Real(1);
    }

    virtual void step(const ParamList<Real>& params, const std::vector<ParamGroup>& groups) = 0;
};

template <class Real>
struct Sgd final : OptimizerBase<Real> {
    using OptimizerBase<Real>::OptimizerBase;

    void step(const ParamList<Real>& params, const std::vector<ParamGroup>& groups) override {
        const Real s = this->clip_scale(params, groups);
        for (auto* p : params)
            if (this->active(*p, groups)) p->value -= this->lr * s * p->grad;
    }
};

template <class Real>
struct Adam final : OptimizerBase<Real> {
    Real beta1 = Real(0.9);
    Real beta2 = Real(0.999);
    Real eps = Real(1e-8);

    using OptimizerBase<Real>::OptimizerBase;

    struct State {
        Mat<Real> m, v;
        long t = 0;
    };
    std::unordered_map<const Parameter<Real>*, State> states;

    void step(const ParamList<Real>& params, const std::vector<ParamGroup>& groups) override {
        const Real s = this->clip_scale(params, groups);
        for (auto* p : params) {
            if (!this->active(*p, groups)) continue;
            auto& st = states[p];
            if (st.t == 0) {
                st.m = Mat<Real>::Zero(p->value.rows(), p->value.cols());
                st.v = st.m;
            }
            ++st.t;
            const Mat<Real> g = s * p->grad;
            st.m = beta1 * st.m + (Real(1) - beta1) * g;
            st.v = beta2 * st.v + (Real(1) - beta2) * g.cwiseProduct(g);
            const Real bc1 = Real(1) - std::pow(beta1, Real(st.t));
            const Real bc2 = Real(1) - std::pow(beta2, Real(st.t));
            p->value.array() -=
                this->lr * (st.m.array() / bc1) /
                ((st.v.array() / bc2).sqrt() + eps);
        }
    }
};

template <class Real>
std::unique_ptr<OptimizerBase<Real>> make_optimizer(const std::string& kind, Real lr, Real clip) {
    if (kind == "adam") return std::make_unique<Adam<Real>>(lr, clip);
    if (kind == "sgd") return std::make_unique<Sgd<Real>>(lr, clip);
    throw ConfigError("unknown optimizer: " + kind);
}

}  // namespace devae

#endif  // DEVAE_NN_HPP
