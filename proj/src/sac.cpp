#include "wpnav/sac.hpp"

#include <unordered_set>

namespace wpnav::sac {

Batch<float> ReplayBuffer::sample(int n, Rng& rng) const {
    if (n < 1 || n > size_) throw std::invalid_argument("ReplayBuffer::sample: bad batch size");
    std::vector<std::int64_t> picks;
    picks.reserve(n);
    std::unordered_set<std::int64_t> seen;
    for (std::int64_t j = size_ - n; j < size_; ++j) {
        const std::int64_t t = std::int64_t(rng.uniform_int(std::uint64_t(j + 1)));
        if (seen.insert(t).second) picks.push_back(t);
        else {
            seen.insert(j);
            picks.push_back(j);
        }
    }

    Batch<float> b;
    b.obs = nn::Tensor<float>({n, obs_dim_});
    b.act = nn::Tensor<float>({n, act_dim_});
    b.next_obs = nn::Tensor<float>({n, obs_dim_});
    b.reward.resize(n);
    b.done_mask.resize(n);
    for (int i = 0; i < n; ++i) {
        const std::size_t s = std::size_t(picks[i]);
        std::copy_n(obs_.begin() + s * obs_dim_, obs_dim_,
                    b.obs.data.begin() + std::size_t(i) * obs_dim_);
        std::copy_n(act_.begin() + s * act_dim_, act_dim_,
                    b.act.data.begin() + std::size_t(i) * act_dim_);
        std::copy_n(next_obs_.begin() + s * obs_dim_, obs_dim_,
                    b.next_obs.data.begin() + std::size_t(i) * obs_dim_);
        b.reward[i] = reward_[s];
        b.done_mask[i] = done_mask_[s];
    }
    return b;
}

template class SacAgent<float>;
template class SacAgent<double>;

}  // namespace wpnav::sac
