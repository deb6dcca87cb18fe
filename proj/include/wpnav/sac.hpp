#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "wpnav/common.hpp"
#include "wpnav/nn.hpp"

namespace wpnav::sac {

// Hyper-parameters follow the original soft actor-critic defaults.
struct SacConfig {
    double lr = 3e-4;
    int batch_size = 256;
    double gamma = 0.99;
    double tau = 0.005;
    int buffer_capacity = 1'000'000;
    int warmup_steps = 1000;
    double init_log_alpha = 0.0;
    double log_std_min = -20.0;
    double log_std_max = 2.0;
    int hidden = 256;
};

inline constexpr double kSquashEps = 1e-6;  // inside log(1 - a^2 + eps)

template <class T>
struct Batch {
    nn::Tensor<T> obs, act, next_obs;   // [N, dim]
    std::vector<T> reward, done_mask;   // done_mask = 1 for absorbing terminals
    int size() const { return obs.dim(0); }
};

// Gaussian policy with tanh squashing. The network maps [N, obs] to
// [N, 2A]: means first, raw log-stds second (clamped to [min, max]).
template <class T>
class GaussianPolicy {
public:
    GaussianPolicy() = default;
    GaussianPolicy(int obs_dim, int act_dim, int hidden, double log_std_min, double log_std_max)
        : obs_dim_(obs_dim), act_dim_(act_dim), log_std_min_(log_std_min),
          log_std_max_(log_std_max) {
        net.template add<nn::FullyConnected<T>>(obs_dim, hidden);
        net.template add<nn::ReLU<T>>();
        net.template add<nn::FullyConnected<T>>(hidden, hidden);
        net.template add<nn::ReLU<T>>();
        net.template add<nn::FullyConnected<T>>(hidden, 2 * act_dim);
    }

    struct Sample {
        nn::Tensor<T> action;     // [N, A], in (-1, 1)
        std::vector<T> log_prob;  // [N]
        // cached intermediates for backward_sample
        nn::Tensor<T> mean, log_std, u;
        std::vector<std::uint8_t> clamp_pass;  // per log_std element
    };

    // Reparameterized sample with caller-provided standard normal noise
    // (N*A values); runs and caches the net forward.
    Sample sample(const nn::Tensor<T>& obs, const T* noise) {
        const int n = obs.dim(0);
        nn::Tensor<T> head = net.forward(obs);
        Sample s;
        s.mean = nn::Tensor<T>({n, act_dim_});
        s.log_std = nn::Tensor<T>({n, act_dim_});
        s.u = nn::Tensor<T>({n, act_dim_});
        s.action = nn::Tensor<T>({n, act_dim_});
        s.log_prob.assign(n, T(0));
        s.clamp_pass.assign(size_t(n) * act_dim_, 0);
        for (int i = 0; i < n; ++i) {
            T logp = T(0);
            for (int j = 0; j < act_dim_; ++j) {
                const std::int64_t idx = std::int64_t(i) * act_dim_ + j;
                const T mu = head.data[std::int64_t(i) * 2 * act_dim_ + j];
                T ls = head.data[std::int64_t(i) * 2 * act_dim_ + act_dim_ + j];
                const bool pass = ls > T(log_std_min_) && ls < T(log_std_max_);
                s.clamp_pass[idx] = pass ? 1 : 0;
                ls = T(clamp(double(ls), log_std_min_, log_std_max_));
                const T sigma = std::exp(ls);
                const T u = mu + sigma * noise[idx];
                const T a = std::tanh(u);
                s.mean.data[idx] = mu;
                s.log_std.data[idx] = ls;
                s.u.data[idx] = u;
                s.action.data[idx] = a;
                const T xi = noise[idx];
                logp += T(-0.5) * xi * xi - ls - T(0.5 * std::log(2.0 * M_PI)) -
                        std::log(T(1) - a * a + T(kSquashEps));
            }
            s.log_prob[i] = logp;
        }
        return s;
    }

    // Chain rule through a = tanh(mu + sigma*xi) and through log_prob's
    // explicit (mu, log_std) dependence; feeds the cached net backward.
    void backward_sample(const Sample& s, const nn::Tensor<T>& d_action,
                         const std::vector<T>& d_logp, bool with_param_grads) {
        const int n = s.action.dim(0);
        nn::Tensor<T> g({n, 2 * act_dim_});
        for (int i = 0; i < n; ++i) {
            const T gl = d_logp[i];
            for (int j = 0; j < act_dim_; ++j) {
                const std::int64_t idx = std::int64_t(i) * act_dim_ + j;
                const T a = s.action.data[idx];
                const T ls = s.log_std.data[idx];
                const T sigma = std::exp(ls);
                const T xi = (s.u.data[idx] - s.mean.data[idx]) / sigma;
                const T one_m_a2 = T(1) - a * a;
                const T dlogp_du = -xi / sigma + T(2) * a * one_m_a2 / (one_m_a2 + T(kSquashEps));
                const T du = d_action.data[idx] * one_m_a2 + gl * dlogp_du;
                const T dmu = du + gl * (xi / sigma);
                T dls = du * sigma * xi + gl * (xi * xi - T(1));
                if (!s.clamp_pass[idx]) dls = T(0);
                g.data[std::int64_t(i) * 2 * act_dim_ + j] = dmu;
                g.data[std::int64_t(i) * 2 * act_dim_ + act_dim_ + j] = dls;
            }
        }
        net.backward(g, with_param_grads);
    }

    // Gaussian log-density with the tanh change-of-variables correction.
    // Throws if any action component lies outside (-1, 1).
    T log_prob(const nn::Tensor<T>& obs, const nn::Tensor<T>& action) {
        const int n = obs.dim(0);
        nn::Tensor<T> head = net.forward(obs);
        T total = T(0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < act_dim_; ++j) {
                const T a = action.data[std::int64_t(i) * act_dim_ + j];
                if (!(a > T(-1) && a < T(1)))
                    throw std::invalid_argument("log_prob: action outside (-1, 1)");
                const T mu = head.data[std::int64_t(i) * 2 * act_dim_ + j];
                const T ls = T(clamp(double(head.data[std::int64_t(i) * 2 * act_dim_ + act_dim_ + j]),
                                     log_std_min_, log_std_max_));
                const T sigma = std::exp(ls);
                const T u = T(0.5) * std::log((T(1) + a) / (T(1) - a));  // atanh
                const T z = (u - mu) / sigma;
                total += T(-0.5) * z * z - ls - T(0.5 * std::log(2.0 * M_PI)) -
                         std::log(T(1) - a * a + T(kSquashEps));
            }
        }
        return total;
    }

    std::vector<T> act(std::span<const T> obs, bool deterministic, Rng& rng) {
        for (const T v : obs)
            if (!std::isfinite(double(v)))
                throw std::invalid_argument("act: non-finite observation");
        nn::Tensor<T> x({1, obs_dim_});
        std::copy(obs.begin(), obs.end(), x.data.begin());
        std::vector<T> noise(act_dim_, T(0));
        if (!deterministic)
            for (auto& v : noise) v = T(rng.normal());
        Sample s = sample(x, noise.data());
        std::vector<T> a(act_dim_);
        if (deterministic) {
            for (int j = 0; j < act_dim_; ++j) a[j] = std::tanh(s.mean.data[j]);
        } else {
            for (int j = 0; j < act_dim_; ++j) a[j] = s.action.data[j];
        }
        return a;
    }

    int obs_dim() const { return obs_dim_; }
    int act_dim() const { return act_dim_; }

    nn::Network<T> net;

private:
    int obs_dim_ = 0, act_dim_ = 0;
    double log_std_min_ = -20.0, log_std_max_ = 2.0;
};

template <class T>
nn::Network<T> make_q_network(int obs_dim, int act_dim, int hidden) {
    nn::Network<T> q;
    q.template add<nn::FullyConnected<T>>(obs_dim + act_dim, hidden);
    q.template add<nn::ReLU<T>>();
    q.template add<nn::FullyConnected<T>>(hidden, hidden);
    q.template add<nn::ReLU<T>>();
    q.template add<nn::FullyConnected<T>>(hidden, 1);
    return q;
}

class ReplayBuffer {
public:
    ReplayBuffer(int obs_dim, int act_dim, int capacity)
        : obs_dim_(obs_dim), act_dim_(act_dim), capacity_(capacity) {
        obs_.resize(std::size_t(capacity) * obs_dim);
        act_.resize(std::size_t(capacity) * act_dim);
        next_obs_.resize(std::size_t(capacity) * obs_dim);
        reward_.resize(capacity);
        done_mask_.resize(capacity);
    }

    void add(std::span<const float> obs, std::span<const float> act, float reward,
             std::span<const float> next_obs, float done_mask) {
        const std::size_t i = next_;
        std::copy(obs.begin(), obs.end(), obs_.begin() + i * obs_dim_);
        std::copy(act.begin(), act.end(), act_.begin() + i * act_dim_);
        std::copy(next_obs.begin(), next_obs.end(), next_obs_.begin() + i * obs_dim_);
        reward_[i] = reward;
        done_mask_[i] = done_mask;
        next_ = (next_ + 1) % capacity_;
        size_ = std::min<std::int64_t>(size_ + 1, capacity_);
    }

    // uniform without replacement within the batch (Floyd's algorithm)
    Batch<float> sample(int n, Rng& rng) const;

    std::int64_t size() const { return size_; }
    int capacity() const { return capacity_; }

private:
    int obs_dim_, act_dim_, capacity_;
    std::vector<float> obs_, act_, next_obs_, reward_, done_mask_;
    std::int64_t size_ = 0;
    std::size_t next_ = 0;
};

struct UpdateDiag {
    double q1_loss = 0, q2_loss = 0, actor_loss = 0;
    double alpha = 0, mean_log_prob = 0, mean_q = 0;
};

template <class T>
class SacAgent {
public:
    SacAgent(int obs_dim, int act_dim, SacConfig cfg, std::uint64_t seed)
        : cfg_(cfg),
          policy(obs_dim, act_dim, cfg.hidden, cfg.log_std_min, cfg.log_std_max),
          q1(make_q_network<T>(obs_dim, act_dim, cfg.hidden)),
          q2(make_q_network<T>(obs_dim, act_dim, cfg.hidden)),
          policy_opt(cfg.lr), q1_opt(cfg.lr), q2_opt(cfg.lr),
          log_alpha_(T(cfg.init_log_alpha)), target_entropy_(-double(act_dim)),
          rng_(Rng::mix(seed, 0x5ac)) {
        Rng init(Rng::mix(seed, 0x1417));
        policy.net.init_he_uniform(init);
        q1.init_he_uniform(init);
        q2.init_he_uniform(init);
        q1_target = q1;
        q2_target = q2;
    }

    std::vector<T> act(std::span<const T> obs, bool deterministic) {
        return policy.act(obs, deterministic, rng_);
    }

    UpdateDiag update(const Batch<T>& batch);

    double alpha() const { return std::exp(double(log_alpha_)); }
    Rng& rng() { return rng_; }
    const SacConfig& config() const { return cfg_; }

    SacConfig cfg_;
    GaussianPolicy<T> policy;
    nn::Network<T> q1, q2, q1_target, q2_target;
    nn::Adam<T> policy_opt, q1_opt, q2_opt;

private:
    void polyak(nn::Network<T>& target, nn::Network<T>& online);

    T log_alpha_;
    double alpha_m_ = 0.0, alpha_v_ = 0.0;
    std::int64_t alpha_t_ = 0;
    double target_entropy_;
    Rng rng_;
};

// one critic/actor/temperature gradient step plus a Polyak target update
template <class T>
UpdateDiag SacAgent<T>::update(const Batch<T>& batch) {
    const int n = batch.size();
    if (n < 1) throw std::invalid_argument("update: batch must be non-empty");
    const int obs_dim = policy.obs_dim();
    const int act_dim = policy.act_dim();
    const double alpha_now = std::exp(double(log_alpha_));

    auto concat = [&](const nn::Tensor<T>& o, const nn::Tensor<T>& a) {
        nn::Tensor<T> c({n, obs_dim + act_dim});
        for (int i = 0; i < n; ++i) {
            std::copy_n(o.ptr() + std::int64_t(i) * obs_dim, obs_dim,
                        c.ptr() + std::int64_t(i) * (obs_dim + act_dim));
            std::copy_n(a.ptr() + std::int64_t(i) * act_dim, act_dim,
                        c.ptr() + std::int64_t(i) * (obs_dim + act_dim) + obs_dim);
        }
        return c;
    };
    auto normals = [&](std::int64_t count) {
        std::vector<T> z(count);
        for (auto& v : z) v = T(rng_.normal());
        return z;
    };

    UpdateDiag diag;
    diag.alpha = alpha_now;

    // critic targets: y = r + gamma * (1 - done) * (min Q_target(s', a') - alpha log pi(a'|s'))
    const auto noise2 = normals(std::int64_t(n) * act_dim);
    auto s2 = policy.sample(batch.next_obs, noise2.data());
    const auto cat2 = concat(batch.next_obs, s2.action);
    const auto q1t = q1_target.forward(cat2);
    const auto q2t = q2_target.forward(cat2);
    std::vector<T> y(n);
    for (int i = 0; i < n; ++i) {
        const T qmin = std::min(q1t.data[i], q2t.data[i]);
        y[i] = batch.reward[i] + T(cfg_.gamma) * (T(1) - batch.done_mask[i]) *
                                     (qmin - T(alpha_now) * s2.log_prob[i]);
    }

    // critic regression toward y
    const auto cat = concat(batch.obs, batch.act);
    auto critic_step = [&](nn::Network<T>& q, nn::Adam<T>& opt, double& loss_out) {
        const auto qv = q.forward(cat);
        nn::Tensor<T> gy({n, 1});
        double loss = 0.0;
        for (int i = 0; i < n; ++i) {
            const T e = qv.data[i] - y[i];
            loss += double(e) * double(e);
            gy.data[i] = T(2) * e / T(n);
        }
        loss_out = loss / n;
        q.zero_grad();
        q.backward(gy, true);
        opt.step(q.params(), q.grads());
    };
    critic_step(q1, q1_opt, diag.q1_loss);
    critic_step(q2, q2_opt, diag.q2_loss);

    // actor: minimize mean(alpha log pi - min Q(s, a_pi))
    const auto noise = normals(std::int64_t(n) * act_dim);
    auto s = policy.sample(batch.obs, noise.data());
    const auto cata = concat(batch.obs, s.action);
    const auto q1a = q1.forward(cata);
    const auto q2a = q2.forward(cata);
    nn::Tensor<T> gy1({n, 1}), gy2({n, 1});
    double actor_loss = 0.0, mean_q = 0.0;
    for (int i = 0; i < n; ++i) {
        const bool first = q1a.data[i] <= q2a.data[i];
        const T qmin = first ? q1a.data[i] : q2a.data[i];
        actor_loss += double(alpha_now) * double(s.log_prob[i]) - double(qmin);
        mean_q += double(qmin);
        (first ? gy1 : gy2).data[i] = T(-1) / T(n);
    }
    diag.actor_loss = actor_loss / n;
    diag.mean_q = mean_q / n;
    const auto gin1 = q1.backward(gy1, false);
    const auto gin2 = q2.backward(gy2, false);
    nn::Tensor<T> d_action({n, act_dim});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < act_dim; ++j)
            d_action.data[std::int64_t(i) * act_dim + j] =
                gin1.data[std::int64_t(i) * (obs_dim + act_dim) + obs_dim + j] +
                gin2.data[std::int64_t(i) * (obs_dim + act_dim) + obs_dim + j];
    std::vector<T> d_logp(n, T(alpha_now) / T(n));
    policy.net.zero_grad();
    policy.backward_sample(s, d_action, d_logp, true);
    policy_opt.step(policy.net.params(), policy.net.grads());

    // temperature: d/dlog_alpha of -log_alpha * mean(log pi + target entropy)
    double mean_logp = 0.0;
    for (int i = 0; i < n; ++i) mean_logp += double(s.log_prob[i]);
    mean_logp /= n;
    diag.mean_log_prob = mean_logp;
    {
        const double g = -(mean_logp + target_entropy_);
        ++alpha_t_;
        alpha_m_ = 0.9 * alpha_m_ + 0.1 * g;
        alpha_v_ = 0.999 * alpha_v_ + 0.001 * g * g;
        const double mhat = alpha_m_ / (1.0 - std::pow(0.9, double(alpha_t_)));
        const double vhat = alpha_v_ / (1.0 - std::pow(0.999, double(alpha_t_)));
        log_alpha_ = T(double(log_alpha_) - cfg_.lr * mhat / (std::sqrt(vhat) + 1e-8));
    }

    if (!std::isfinite(diag.q1_loss) || !std::isfinite(diag.q2_loss) ||
        !std::isfinite(diag.actor_loss))
        throw TrainingDivergedError("sac update: non-finite loss");

    polyak(q1_target, q1);
    polyak(q2_target, q2);
    return diag;
}

template <class T>
void SacAgent<T>::polyak(nn::Network<T>& target, nn::Network<T>& online) {
    auto tp = target.params();
    auto op = online.params();
    for (size_t k = 0; k < tp.size(); ++k)
        for (size_t i = 0; i < tp[k]->data.size(); ++i)
            tp[k]->data[i] =
                T(1.0 - cfg_.tau) * tp[k]->data[i] + T(cfg_.tau) * op[k]->data[i];
}

}  // namespace wpnav::sac
