#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "wpnav/common.hpp"
#include "wpnav/kernels.hpp"

namespace wpnav::nn {

template <class T>
struct Tensor {
    std::vector<int> shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        data.assign(numel_of(shape), T(0));
    }
    static std::int64_t numel_of(const std::vector<int>& s) {
        std::int64_t n = 1;
        for (int d : s) n *= d;
        return n;
    }
    std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
    int dim(int i) const { return shape[i]; }
    T* ptr() { return data.data(); }
    const T* ptr() const { return data.data(); }
};

enum class LayerKind : std::uint32_t {
    conv2d = 1,
    fully_connected = 2,
    global_avg_pool = 3,
    relu = 4,
    tanh_act = 5,
};

template <class T>
class Layer {
public:
    virtual ~Layer() = default;
    virtual LayerKind kind() const = 0;
    // caches whatever backward needs
    virtual Tensor<T> forward(const Tensor<T>& x) = 0;
    // returns grad wrt input; accumulates parameter grads unless disabled
    virtual Tensor<T> backward(const Tensor<T>& gy, bool with_param_grads) = 0;
    virtual std::vector<Tensor<T>*> params() { return {}; }
    virtual std::vector<Tensor<T>*> grads() { return {}; }
    virtual std::vector<std::uint32_t> meta() const { return {}; }
    virtual std::unique_ptr<Layer<T>> clone() const = 0;
};

template <class T>
class Conv2d final : public Layer<T> {
public:
    Conv2d(int in_c, int out_c, int kernel, int stride)
        : in_c_(in_c), out_c_(out_c), kernel_(kernel), stride_(stride),
          weight_({kernel * kernel * in_c, out_c}), bias_({out_c}),
          grad_weight_({kernel * kernel * in_c, out_c}), grad_bias_({out_c}) {}

    LayerKind kind() const override { return LayerKind::conv2d; }
    std::vector<std::uint32_t> meta() const override {
        return {std::uint32_t(in_c_), std::uint32_t(out_c_), std::uint32_t(kernel_),
                std::uint32_t(stride_)};
    }

    Tensor<T> forward(const Tensor<T>& x) override {
        if (x.shape.size() != 4 || x.dim(3) != in_c_)
            throw std::invalid_argument("Conv2d: expected NHWC input with matching channels");
        shape_ = kernels::ConvShape{x.dim(0), x.dim(1), x.dim(2), in_c_, kernel_, out_c_, stride_};
        const std::int64_t rows = shape_.col_rows();
        col_.resize(rows * shape_.col_cols());  // im2col overwrites every entry
        kernels::im2col(shape_, x.ptr(), col_.data(), kernels::active_backend());

        Tensor<T> y({shape_.batch, shape_.out_h(), shape_.out_w(), out_c_});
        kernels::gemm<T>(false, false, int(rows), out_c_, shape_.col_cols(), T(1), col_.data(),
                         shape_.col_cols(), weight_.ptr(), out_c_, T(0), y.ptr(), out_c_);
        T* yp = y.ptr();
        for (std::int64_t r = 0; r < rows; ++r)
            for (int j = 0; j < out_c_; ++j) yp[r * out_c_ + j] += bias_.data[j];
        cached_ = true;
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, bool with_param_grads) override {
        if (!cached_) throw std::logic_error("Conv2d: backward before forward");
        const std::int64_t rows = shape_.col_rows();
        if (with_param_grads) {
            // dW += col^T * gy, db += column sums
            kernels::gemm<T>(true, false, shape_.col_cols(), out_c_, int(rows), T(1), col_.data(),
                             shape_.col_cols(), gy.ptr(), out_c_, T(1), grad_weight_.ptr(), out_c_);
            const T* gp = gy.ptr();
            for (std::int64_t r = 0; r < rows; ++r)
                for (int j = 0; j < out_c_; ++j) grad_bias_.data[j] += gp[r * out_c_ + j];
        }
        // dcol = gy * W^T, then scatter back
        dcol_.resize(rows * shape_.col_cols());
        kernels::gemm<T>(false, true, int(rows), shape_.col_cols(), out_c_, T(1), gy.ptr(), out_c_,
                         weight_.ptr(), out_c_, T(0), dcol_.data(), shape_.col_cols());
        Tensor<T> gx({shape_.batch, shape_.in_h, shape_.in_w, in_c_});
        kernels::col2im(shape_, dcol_.data(), gx.ptr(), kernels::active_backend());
        return gx;
    }

    std::vector<Tensor<T>*> params() override { return {&weight_, &bias_}; }
    std::vector<Tensor<T>*> grads() override { return {&grad_weight_, &grad_bias_}; }
    std::unique_ptr<Layer<T>> clone() const override {
        auto c = std::make_unique<Conv2d<T>>(in_c_, out_c_, kernel_, stride_);
        c->weight_ = weight_;
        c->bias_ = bias_;
        return c;
    }

private:
    int in_c_, out_c_, kernel_, stride_;
    Tensor<T> weight_, bias_, grad_weight_, grad_bias_;
    kernels::ConvShape shape_{};
    std::vector<T> col_, dcol_;
    bool cached_ = false;
};

template <class T>
class FullyConnected final : public Layer<T> {
public:
    FullyConnected(int in, int out)
        : in_(in), out_(out), weight_({in, out}), bias_({out}), grad_weight_({in, out}),
          grad_bias_({out}) {}

    LayerKind kind() const override { return LayerKind::fully_connected; }
    std::vector<std::uint32_t> meta() const override {
        return {std::uint32_t(in_), std::uint32_t(out_)};
    }

    Tensor<T> forward(const Tensor<T>& x) override {
        if (x.shape.size() != 2 || x.dim(1) != in_)
            throw std::invalid_argument("FullyConnected: expected [N, in] input");
        input_ = x;
        const int n = x.dim(0);
        Tensor<T> y({n, out_});
        kernels::gemm<T>(false, false, n, out_, in_, T(1), x.ptr(), in_, weight_.ptr(), out_, T(0),
                         y.ptr(), out_);
        T* yp = y.ptr();
        for (int r = 0; r < n; ++r)
            for (int j = 0; j < out_; ++j) yp[r * out_ + j] += bias_.data[j];
        cached_ = true;
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, bool with_param_grads) override {
        if (!cached_) throw std::logic_error("FullyConnected: backward before forward");
        const int n = input_.dim(0);
        if (with_param_grads) {
            kernels::gemm<T>(true, false, in_, out_, n, T(1), input_.ptr(), in_, gy.ptr(), out_,
                             T(1), grad_weight_.ptr(), out_);
            const T* gp = gy.ptr();
            for (int r = 0; r < n; ++r)
                for (int j = 0; j < out_; ++j) grad_bias_.data[j] += gp[r * out_ + j];
        }
        Tensor<T> gx({n, in_});
        kernels::gemm<T>(false, true, n, in_, out_, T(1), gy.ptr(), out_, weight_.ptr(), out_,
                         T(0), gx.ptr(), in_);
        return gx;
    }

    std::vector<Tensor<T>*> params() override { return {&weight_, &bias_}; }
    std::vector<Tensor<T>*> grads() override { return {&grad_weight_, &grad_bias_}; }
    std::unique_ptr<Layer<T>> clone() const override {
        auto c = std::make_unique<FullyConnected<T>>(in_, out_);
        c->weight_ = weight_;
        c->bias_ = bias_;
        return c;
    }

private:
    int in_, out_;
    Tensor<T> weight_, bias_, grad_weight_, grad_bias_;
    Tensor<T> input_;
    bool cached_ = false;
};

template <class T>
class GlobalAvgPool final : public Layer<T> {
public:
    LayerKind kind() const override { return LayerKind::global_avg_pool; }

    Tensor<T> forward(const Tensor<T>& x) override {
        if (x.shape.size() != 4) throw std::invalid_argument("GlobalAvgPool: expected NHWC input");
        in_shape_ = x.shape;
        const int n = x.dim(0), hw = x.dim(1) * x.dim(2), c = x.dim(3);
        Tensor<T> y({n, c});
        const T* xp = x.ptr();
        for (int b = 0; b < n; ++b) {
            T* yrow = y.ptr() + std::int64_t(b) * c;
            const T* base = xp + std::int64_t(b) * hw * c;
            for (int s = 0; s < hw; ++s)
                for (int j = 0; j < c; ++j) yrow[j] += base[std::int64_t(s) * c + j];
            for (int j = 0; j < c; ++j) yrow[j] /= T(hw);
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, bool) override {
        if (in_shape_.empty()) throw std::logic_error("GlobalAvgPool: backward before forward");
        const int n = in_shape_[0], hw = in_shape_[1] * in_shape_[2], c = in_shape_[3];
        Tensor<T> gx(in_shape_);
        T* gp = gx.ptr();
        for (int b = 0; b < n; ++b) {
            const T* grow = gy.ptr() + std::int64_t(b) * c;
            T* base = gp + std::int64_t(b) * hw * c;
            for (int s = 0; s < hw; ++s)
                for (int j = 0; j < c; ++j) base[std::int64_t(s) * c + j] = grow[j] / T(hw);
        }
        return gx;
    }

    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<GlobalAvgPool<T>>(); }

private:
    std::vector<int> in_shape_;
};

template <class T>
class ReLU final : public Layer<T> {
public:
    LayerKind kind() const override { return LayerKind::relu; }

    Tensor<T> forward(const Tensor<T>& x) override {
        mask_.assign(x.data.size(), 0);
        Tensor<T> y = x;
        for (size_t i = 0; i < y.data.size(); ++i) {
            if (y.data[i] > T(0)) mask_[i] = 1;
            else y.data[i] = T(0);
        }
        cached_ = true;
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, bool) override {
        if (!cached_) throw std::logic_error("ReLU: backward before forward");
        Tensor<T> gx = gy;
        for (size_t i = 0; i < gx.data.size(); ++i)
            if (!mask_[i]) gx.data[i] = T(0);
        return gx;
    }

    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<ReLU<T>>(); }

private:
    std::vector<std::uint8_t> mask_;
    bool cached_ = false;
};

template <class T>
class Tanh final : public Layer<T> {
public:
    LayerKind kind() const override { return LayerKind::tanh_act; }

    Tensor<T> forward(const Tensor<T>& x) override {
        out_ = x;
        for (auto& v : out_.data) v = std::tanh(v);
        cached_ = true;
        return out_;
    }

    Tensor<T> backward(const Tensor<T>& gy, bool) override {
        if (!cached_) throw std::logic_error("Tanh: backward before forward");
        Tensor<T> gx = gy;
        for (size_t i = 0; i < gx.data.size(); ++i)
            gx.data[i] *= T(1) - out_.data[i] * out_.data[i];
        return gx;
    }

    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Tanh<T>>(); }

private:
    Tensor<T> out_;
    bool cached_ = false;
};

template <class T>
class Network {
public:
    Network() = default;
    Network(Network&&) noexcept = default;
    Network& operator=(Network&&) noexcept = default;
    Network(const Network& o) { *this = o; }
    Network& operator=(const Network& o) {
        layers_.clear();
        for (const auto& l : o.layers_) layers_.push_back(l->clone());
        return *this;
    }

    template <class L, class... Args>
    Network& add(Args&&... args) {
        layers_.push_back(std::make_unique<L>(std::forward<Args>(args)...));
        return *this;
    }

    Tensor<T> forward(const Tensor<T>& x) {
        Tensor<T> h = x;
        for (auto& l : layers_) h = l->forward(h);
        forwarded_ = true;
        return h;
    }

    Tensor<T> backward(const Tensor<T>& gy, bool with_param_grads = true) {
        if (!forwarded_) throw std::logic_error("Network: backward before forward");
        Tensor<T> g = gy;
        for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
            g = (*it)->backward(g, with_param_grads);
        return g;
    }

    std::vector<Tensor<T>*> params() {
        std::vector<Tensor<T>*> out;
        for (auto& l : layers_)
            for (auto* p : l->params()) out.push_back(p);
        return out;
    }
    std::vector<Tensor<T>*> grads() {
        std::vector<Tensor<T>*> out;
        for (auto& l : layers_)
            for (auto* g : l->grads()) out.push_back(g);
        return out;
    }
    void zero_grad() {
        for (auto* g : grads()) std::fill(g->data.begin(), g->data.end(), T(0));
    }

    // He-uniform on weight matrices (fan_in from the tensor shape), zero biases
    void init_he_uniform(Rng& rng) {
        for (auto& l : layers_) {
            auto ps = l->params();
            if (ps.empty()) continue;
            Tensor<T>* w = ps[0];
            const int fan_in = w->dim(0);
            const double limit = std::sqrt(6.0 / fan_in);
            for (auto& v : w->data) v = T(rng.uniform(-limit, limit));
            for (size_t i = 1; i < ps.size(); ++i)
                std::fill(ps[i]->data.begin(), ps[i]->data.end(), T(0));
        }
    }

    const std::vector<std::unique_ptr<Layer<T>>>& layers() const { return layers_; }
    std::vector<std::unique_ptr<Layer<T>>>& layers() { return layers_; }

private:
    std::vector<std::unique_ptr<Layer<T>>> layers_;
    bool forwarded_ = false;
};

template <class T>
struct Adam {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::int64_t t = 0;
    std::vector<std::vector<T>> m, v;

    explicit Adam(double lr_ = 3e-4) : lr(lr_) {}

    void step(const std::vector<Tensor<T>*>& params, const std::vector<Tensor<T>*>& grads) {
        if (params.size() != grads.size())
            throw std::invalid_argument("Adam: params/grads size mismatch");
        if (m.empty()) {
            for (auto* p : params) {
                m.emplace_back(p->data.size(), T(0));
                v.emplace_back(p->data.size(), T(0));
            }
        }
        ++t;
        const double c1 = 1.0 - std::pow(beta1, double(t));
        const double c2 = 1.0 - std::pow(beta2, double(t));
        double grad_accum = 0.0;
        for (size_t k = 0; k < params.size(); ++k) {
            auto& pd = params[k]->data;
            auto& gd = grads[k]->data;
            if (pd.size() != gd.size() || pd.size() != m[k].size())
                throw std::invalid_argument("Adam: shape mismatch");
            for (size_t i = 0; i < pd.size(); ++i) {
                const double g = double(gd[i]);
                grad_accum += std::abs(g);
                m[k][i] = T(beta1 * double(m[k][i]) + (1.0 - beta1) * g);
                v[k][i] = T(beta2 * double(v[k][i]) + (1.0 - beta2) * g * g);
                const double mhat = double(m[k][i]) / c1;
                const double vhat = double(v[k][i]) / c2;
                pd[i] = T(double(pd[i]) - lr * mhat / (std::sqrt(vhat) + eps));
            }
        }
        if (!std::isfinite(grad_accum))
            throw TrainingDivergedError("Adam: non-finite gradient at step " + std::to_string(t));
    }
};

// NNCK checkpoint: "NNCK", version u32, layer count u32; per layer: kind u32,
// meta count + u32 meta, tensor count, per tensor rank + dims + float32 data.
template <class T>
void save_network(Network<T>& net, const std::string& path);
template <class T>
Network<T> load_network(const std::string& path);

}  // namespace wpnav::nn
