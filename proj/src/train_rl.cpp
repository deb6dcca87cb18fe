#include <array>
#include <filesystem>
#include <optional>

#include "wpnav/csv.hpp"
#include "wpnav/harness.hpp"

namespace wpnav {

TrainRlResult train_rl(const RunConfig& cfg, std::uint64_t seed, const std::string& out_dir,
                       nn::Network<float>* sl_model) {
    const RewardMode mode = cfg.rl.reward_mode;
    if (mode == RewardMode::waypoint && !sl_model)
        throw std::invalid_argument("train_rl: waypoint mode needs a trained waypoint model");

    std::filesystem::create_directories(out_dir);
    save_run_config(cfg, out_dir + "/config.ini");

    const int obs_dim = observation_dim(mode);
    sac::SacConfig scfg = cfg.rl.sac;
    scfg.buffer_capacity = std::min(scfg.buffer_capacity, cfg.rl.total_steps + 1);
    sac::SacAgent<float> agent(obs_dim, 2, scfg, seed);
    sac::ReplayBuffer buffer(obs_dim, 2, scfg.buffer_capacity);

    World env(cfg.field, cfg.robot);
    std::optional<CnnWaypointSource> source;
    if (sl_model) source.emplace(*sl_model);
    WaypointTracker tracker(source ? &*source : nullptr, cfg.replan);
    Rng warmup_rng(Rng::mix(seed, 0x9a9));

    std::uint64_t episode_counter = 0;
    Observation obs;
    auto reset_episode = [&]() {
        obs = env.reset(Rng::mix(Rng::mix(seed, 0xE9), episode_counter++));
        if (mode == RewardMode::waypoint) tracker.start_episode(env);
    };
    reset_episode();

    const std::string curve_path = out_dir + "/curve.csv";
    CsvWriter curve(curve_path, "env_step,eval_return,eval_steps_to_goal,reach_rate,collisions");

    TrainRlResult result;
    result.curve_path = curve_path;

    std::vector<float> x, x2, act_f(2);
    for (int t = 1; t <= cfg.rl.total_steps; ++t) {
        build_observation(obs, env.robot(), tracker.waypoints(), mode, x);
        std::array<double, 2> action;
        if (t <= scfg.warmup_steps) {
            action = {warmup_rng.uniform(-1.0, 1.0), warmup_rng.uniform(-1.0, 1.0)};
        } else {
            const auto a = agent.act(std::span<const float>(x), false);
            action = {double(a[0]), double(a[1])};
        }
        const Vec2 x_prev = env.robot().position;
        const StepOutcome out = env.step(action);
        const Vec2 x_next = env.robot().position;

        double r;
        if (mode == RewardMode::waypoint)
            r = out.reward_task + tracker.after_step(env, x_prev, x_next).shaping;
        else
            r = baseline_reward(out.reward_task, x_next, env.goal());

        // timeouts bootstrap; goal and out-of-bounds are absorbing
        const float done_mask = (out.termination_cause == TerminationCause::goal ||
                                 out.termination_cause == TerminationCause::out_of_bounds)
                                    ? 1.0f
                                    : 0.0f;
        build_observation(out.next_observation, env.robot(), tracker.waypoints(), mode, x2);
        act_f[0] = float(action[0]);
        act_f[1] = float(action[1]);
        buffer.add(x, act_f, float(r), x2, done_mask);

        obs = out.next_observation;
        if (out.terminated) reset_episode();

        if (t > scfg.warmup_steps && buffer.size() >= scfg.batch_size)
            agent.update(buffer.sample(scfg.batch_size, agent.rng()));

        if (t % cfg.rl.eval_interval == 0 || t == cfg.rl.total_steps) {
            const EvalStats ev =
                evaluate_policy(cfg.field, cfg.robot, agent.policy, mode,
                                source ? &*source : nullptr, cfg.replan, cfg.rl.eval_episodes);
            curve.field(t).field(ev.mean_return).field(ev.mean_steps_to_goal);
            curve.field(ev.reach_rate).field(ev.mean_collisions);
            curve.end_row();
            if (ev.reach_rate > result.best_reach_rate) {
                result.best_reach_rate = ev.reach_rate;
                result.best_step = t;
            }
            result.final_reach_rate = ev.reach_rate;
            result.final_steps_to_goal = ev.mean_steps_to_goal;
            if (t == cfg.rl.total_steps) break;
        }
    }

    nn::save_network(agent.policy.net, out_dir + "/policy.nnck");
    nn::save_network(agent.q1, out_dir + "/q1.nnck");
    nn::save_network(agent.q2, out_dir + "/q2.nnck");
    return result;
}

}  // namespace wpnav
