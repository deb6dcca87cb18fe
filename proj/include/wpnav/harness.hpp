#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wpnav/config.hpp"
#include "wpnav/path_reward.hpp"
#include "wpnav/sac.hpp"
#include "wpnav/waypoint_net.hpp"

namespace wpnav {

// eval layouts are shared across methods and training seeds
inline constexpr std::uint64_t kEvalLayoutTag = 0xE7A1;

int observation_dim(RewardMode mode);

// proprio(5) + lidar(10) + either egocentric waypoints(20) or goal_rel(2)
void build_observation(const Observation& obs, const RobotState& robot,
                       const std::vector<Vec2>& waypoints_world, RewardMode mode,
                       std::vector<float>& out);

// Waypoint bookkeeping for one episode: replanning, the divided reference
// path, the agent trace since the last replan, and the shaping reward.
class WaypointTracker {
public:
    WaypointTracker(WaypointSource* source, ReplanPolicy policy)
        : source_(source), policy_(policy) {}

    void start_episode(World& world);

    struct StepEval {
        double shaping = 0.0;  // w1*d_path + w2*n_progress
        double d_path = 0.0;
        int n_progress = 0;
        bool replanned = false;
    };
    // reward terms for the step just taken (against the path active during
    // the step), then fires the replanning rule
    StepEval after_step(World& world, Vec2 x_prev, Vec2 x_next);

    const std::vector<Vec2>& waypoints() const { return waypoints_; }
    int replan_count() const { return replans_; }

private:
    void replan(World& world);

    WaypointSource* source_;
    ReplanPolicy policy_;
    std::vector<Vec2> waypoints_;
    DividedPath divided_;
    AgentTrace trace_;
    int steps_since_ = 0;
    int replans_ = 0;
};

struct EpisodeStats {
    int steps = 0;
    bool reached = false;
    int collisions = 0;
    double mode_return = 0.0;      // sum of the training-mode reward
    double baseline_return = 0.0;  // comparison metric: f + w5*d_goal summed
    TerminationCause cause = TerminationCause::none;
};

struct EpisodeLogRow {
    int step;
    double x, y, theta, reward;
    int collided;
    TerminationCause cause;
};

// One evaluation episode with the deterministic policy. `source` must be
// non-null in waypoint mode and is ignored in baseline mode.
EpisodeStats run_episode(World& world, sac::GaussianPolicy<float>& policy, RewardMode mode,
                         WaypointSource* source, const ReplanPolicy& replan,
                         std::uint64_t reset_seed, std::vector<EpisodeLogRow>* log = nullptr);

void write_episode_log(const std::vector<EpisodeLogRow>& rows, const std::string& path);

struct EvalStats {
    double mean_return = 0.0;         // baseline-metric return
    double mean_steps_to_goal = 0.0;  // failures counted at the episode cap
    double reach_rate = 0.0;
    double mean_collisions = 0.0;
    double mean_steps_reached = 0.0;  // over reached episodes only
    int reached_count = 0;
    int episodes = 0;
};

EvalStats evaluate_policy(const FieldSpec& spec, RobotType robot,
                          sac::GaussianPolicy<float>& policy, RewardMode mode,
                          WaypointSource* source, const ReplanPolicy& replan, int episodes,
                          std::uint64_t layout_tag = kEvalLayoutTag);

struct TrainRlResult {
    double final_reach_rate = 0.0;
    double final_steps_to_goal = 0.0;
    double best_reach_rate = 0.0;
    int best_step = 0;
    std::string curve_path;
};

// Rollout-and-update loop: uniform random actions for the first
// `warmup_steps`, one SAC update per env step afterwards, periodic
// deterministic evaluations appended to <out_dir>/curve.csv, checkpoints and
// the serialized config written to out_dir.
TrainRlResult train_rl(const RunConfig& cfg, std::uint64_t seed, const std::string& out_dir,
                       nn::Network<float>* sl_model);

struct EvalRow {
    std::string env;
    std::string method;
    double reach_rate = 0.0;
    double steps_to_goal = 0.0;  // mean over reached episodes
    double mean_collisions = 0.0;
    int reached_count = 0;
    int episodes = 0;
};

std::vector<FieldSpec> generalization_envs(std::uint64_t rng_seed);

// baseline / ours / ours_finetuned over each environment
std::vector<EvalRow> generalization_suite(sac::GaussianPolicy<float>& baseline_policy,
                                          sac::GaussianPolicy<float>& waypoint_policy,
                                          nn::Network<float>& base_model,
                                          std::vector<nn::Network<float>>& finetuned_models,
                                          const std::vector<FieldSpec>& envs, RobotType robot,
                                          const ReplanPolicy& replan, int episodes);

void write_eval_report(const std::vector<EvalRow>& rows, const std::string& path);

// Trains the waypoint-mode agent once per replanning setting (rule_based is
// always included) and writes one learning-curve CSV per setting.
struct ReplanStudyRow {
    std::string setting;
    std::uint64_t seed;
    double final_steps_to_goal;
    double final_reach_rate;
    std::string curve_path;
};
std::vector<ReplanStudyRow> replan_frequency_study(const RunConfig& cfg,
                                                   nn::Network<float>& sl_model,
                                                   const std::vector<int>& intervals,
                                                   const std::vector<std::uint64_t>& seeds,
                                                   const std::string& out_dir);

void write_sl_log(const std::vector<SlEpochRow>& rows, const std::string& path);

}  // namespace wpnav
