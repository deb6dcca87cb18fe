#include "wpnav/harness.hpp"

#include <filesystem>

#include "wpnav/csv.hpp"

namespace wpnav {

int observation_dim(RewardMode mode) {
    return mode == RewardMode::waypoint ? 5 + 10 + 2 * kWaypointCount : 5 + 10 + 2;
}

void build_observation(const Observation& obs, const RobotState& robot,
                       const std::vector<Vec2>& waypoints_world, RewardMode mode,
                       std::vector<float>& out) {
    out.clear();
    for (double v : obs.proprio) out.push_back(float(v));
    for (double v : obs.lidar) out.push_back(float(v));
    if (mode == RewardMode::waypoint) {
        const double ch = std::cos(robot.heading), sh = std::sin(robot.heading);
        for (const Vec2& w : waypoints_world) {
            const Vec2 ego = rotate(w - robot.position, ch, -sh);
            out.push_back(float(ego.x));
            out.push_back(float(ego.y));
        }
    } else {
        out.push_back(float(obs.goal_rel.x));
        out.push_back(float(obs.goal_rel.y));
    }
}

void WaypointTracker::replan(World& world) {
    auto wps = source_ ? source_->waypoints(world) : std::nullopt;
    if (wps) {
        waypoints_ = std::move(*wps);
    } else {
        // fallback reference: straight segment to the goal at label spacing
        waypoints_.clear();
        const Vec2 p = world.robot().position, g = world.goal();
        const Vec2 d = g - p;
        const double len = d.norm();
        for (int i = 1; i <= kWaypointCount; ++i) {
            const double arc = std::min(len, i * kLabelSpacing);
            waypoints_.push_back(len > 1e-12 ? p + d * (arc / len) : p);
        }
    }
    divided_ = divide(waypoints_);
    trace_.reset(world.robot().position);
    steps_since_ = 0;
    ++replans_;
}

void WaypointTracker::start_episode(World& world) {
    replans_ = 0;
    replan(world);  // step 0 always replans
}

WaypointTracker::StepEval WaypointTracker::after_step(World& world, Vec2 x_prev, Vec2 x_next) {
    trace_.append(x_next);
    ++steps_since_;
    StepEval ev;
    ev.d_path = d_path(trace_, divided_);
    ev.n_progress = n_progress(x_prev, x_next, divided_);
    ev.shaping = kPathDistWeight * ev.d_path + kProgressWeight * ev.n_progress;
    if (!world.terminated() &&
        should_replan(ev.d_path, nni(x_next, waypoints_), int(waypoints_.size()), policy_,
                      steps_since_)) {
        replan(world);
        ev.replanned = true;
    }
    return ev;
}

EpisodeStats run_episode(World& world, sac::GaussianPolicy<float>& policy, RewardMode mode,
                         WaypointSource* source, const ReplanPolicy& replan,
                         std::uint64_t reset_seed, std::vector<EpisodeLogRow>* log) {
    Observation obs = world.reset(reset_seed);
    WaypointTracker tracker(source, replan);
    if (mode == RewardMode::waypoint) tracker.start_episode(world);

    EpisodeStats stats;
    std::vector<float> x;
    Rng unused(0);
    while (!world.terminated()) {
        build_observation(obs, world.robot(), tracker.waypoints(), mode, x);
        const auto action = policy.act(std::span<const float>(x), true, unused);
        const Vec2 x_prev = world.robot().position;
        const std::vector<double> act_d(action.begin(), action.end());
        const StepOutcome out = world.step(act_d);
        const Vec2 x_next = world.robot().position;

        double r = out.reward_task;
        if (mode == RewardMode::waypoint)
            r += tracker.after_step(world, x_prev, x_next).shaping;
        else
            r = baseline_reward(out.reward_task, x_next, world.goal());

        stats.mode_return += r;
        stats.baseline_return += baseline_reward(out.reward_task, x_next, world.goal());
        stats.collisions += out.collided ? 1 : 0;
        ++stats.steps;
        if (log)
            log->push_back({stats.steps, x_next.x, x_next.y, world.robot().heading, r,
                            out.collided ? 1 : 0, out.termination_cause});
        obs = out.next_observation;
        stats.reached = out.reached_goal;
        stats.cause = out.termination_cause;
    }
    return stats;
}

void write_episode_log(const std::vector<EpisodeLogRow>& rows, const std::string& path) {
    CsvWriter csv(path, "step,x,y,theta,reward,collided,cause");
    for (const auto& r : rows) {
        csv.field(r.step).field(r.x).field(r.y).field(r.theta).field(r.reward).field(r.collided);
        csv.field(std::string(to_string(r.cause)));
        csv.end_row();
    }
}

EvalStats evaluate_policy(const FieldSpec& spec, RobotType robot,
                          sac::GaussianPolicy<float>& policy, RewardMode mode,
                          WaypointSource* source, const ReplanPolicy& replan, int episodes,
                          std::uint64_t layout_tag) {
    EvalStats s;
    s.episodes = episodes;
    for (int ep = 0; ep < episodes; ++ep) {
        World world(spec, robot);
        const EpisodeStats st =
            run_episode(world, policy, mode, source, replan, Rng::mix(layout_tag, ep));
        s.mean_return += st.baseline_return;
        s.mean_collisions += st.collisions;
        s.reach_rate += st.reached ? 1.0 : 0.0;
        s.mean_steps_to_goal += st.reached ? st.steps : world.step_limit();
        if (st.reached) {
            s.mean_steps_reached += st.steps;
            ++s.reached_count;
        }
    }
    if (episodes > 0) {
        s.mean_return /= episodes;
        s.mean_collisions /= episodes;
        s.reach_rate /= episodes;
        s.mean_steps_to_goal /= episodes;
    }
    if (s.reached_count > 0) s.mean_steps_reached /= s.reached_count;
    return s;
}

std::vector<FieldSpec> generalization_envs(std::uint64_t rng_seed) {
    std::vector<FieldSpec> envs;
    envs.push_back({2.0, 2.0, 10, LayoutKind::gremlin, rng_seed});
    envs.push_back({3.0, 3.0, 25, LayoutKind::pillar, rng_seed});
    envs.push_back({4.0, 4.0, 40, LayoutKind::pillar, rng_seed});
    envs.push_back({2.0, 2.0, 5, LayoutKind::two_room, rng_seed});
    envs.push_back({2.0, 2.0, 5, LayoutKind::four_room, rng_seed});
    return envs;
}

namespace {

std::string env_name(const FieldSpec& s) {
    if (s.layout == LayoutKind::pillar)
        return "pillar_" + std::to_string(int(s.width)) + "x" + std::to_string(int(s.height)) +
               "x" + std::to_string(s.obstacle_count);
    return to_string(s.layout);
}

EvalRow to_row(const std::string& env, const std::string& method, const EvalStats& s) {
    EvalRow r;
    r.env = env;
    r.method = method;
    r.reach_rate = s.reach_rate;
    r.steps_to_goal = s.mean_steps_reached;
    r.mean_collisions = s.mean_collisions;
    r.reached_count = s.reached_count;
    r.episodes = s.episodes;
    return r;
}

}  // namespace

std::vector<EvalRow> generalization_suite(sac::GaussianPolicy<float>& baseline_policy,
                                          sac::GaussianPolicy<float>& waypoint_policy,
                                          nn::Network<float>& base_model,
                                          std::vector<nn::Network<float>>& finetuned_models,
                                          const std::vector<FieldSpec>& envs, RobotType robot,
                                          const ReplanPolicy& replan, int episodes) {
    if (finetuned_models.size() != envs.size())
        throw std::invalid_argument("generalization_suite: one fine-tuned model per env");
    std::vector<EvalRow> rows;
    for (size_t e = 0; e < envs.size(); ++e) {
        const std::string name = env_name(envs[e]);
        const EvalStats b = evaluate_policy(envs[e], robot, baseline_policy, RewardMode::baseline,
                                            nullptr, replan, episodes);
        rows.push_back(to_row(name, "baseline", b));
        CnnWaypointSource base_src(base_model);
        const EvalStats o = evaluate_policy(envs[e], robot, waypoint_policy, RewardMode::waypoint,
                                            &base_src, replan, episodes);
        rows.push_back(to_row(name, "ours", o));
        CnnWaypointSource ft_src(finetuned_models[e]);
        const EvalStats f = evaluate_policy(envs[e], robot, waypoint_policy, RewardMode::waypoint,
                                            &ft_src, replan, episodes);
        rows.push_back(to_row(name, "ours_finetuned", f));
    }
    return rows;
}

void write_eval_report(const std::vector<EvalRow>& rows, const std::string& path) {
    CsvWriter csv(path, "env,method,reach_rate,steps_to_goal,mean_collisions,reached,episodes");
    for (const auto& r : rows) {
        csv.field(r.env).field(r.method).field(r.reach_rate).field(r.steps_to_goal);
        csv.field(r.mean_collisions).field(r.reached_count).field(r.episodes);
        csv.end_row();
    }
}

std::vector<ReplanStudyRow> replan_frequency_study(const RunConfig& cfg,
                                                   nn::Network<float>& sl_model,
                                                   const std::vector<int>& intervals,
                                                   const std::vector<std::uint64_t>& seeds,
                                                   const std::string& out_dir) {
    std::vector<ReplanPolicy> settings;
    settings.push_back(ReplanPolicy::rule_based(cfg.replan.d_update));
    for (int iv : intervals) settings.push_back(ReplanPolicy::fixed(iv));

    std::filesystem::create_directories(out_dir);
    std::vector<ReplanStudyRow> rows;
    for (const auto& setting : settings) {
        for (std::uint64_t seed : seeds) {
            RunConfig run = cfg;
            run.replan = setting;
            run.rl.reward_mode = RewardMode::waypoint;
            const std::string dir =
                out_dir + "/" + setting.name() + "_seed" + std::to_string(seed);
            const TrainRlResult res = train_rl(run, seed, dir, &sl_model);
            rows.push_back({setting.name(), seed, res.final_steps_to_goal, res.final_reach_rate,
                            res.curve_path});
        }
    }
    return rows;
}

void write_sl_log(const std::vector<SlEpochRow>& rows, const std::string& path) {
    CsvWriter csv(path, "epoch,train_mse,val_mse");
    for (const auto& r : rows) {
        csv.field(r.epoch).field(r.train_mse).field(r.val_mse);
        csv.end_row();
    }
}

}  // namespace wpnav
