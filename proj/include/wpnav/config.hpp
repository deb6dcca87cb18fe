#pragma once

#include <string>

#include "wpnav/replan.hpp"
#include "wpnav/sac.hpp"
#include "wpnav/world.hpp"

namespace wpnav {

enum class RewardMode { waypoint, baseline };
const char* to_string(RewardMode m);
std::optional<RewardMode> reward_mode_from_string(const std::string& s);

struct SlConfig {
    int dataset_count = 20000;
    int epochs = 30;
    int batch = 64;
    double lr = 3e-4;
    double val_split = 0.1;
};

struct RlConfig {
    int total_steps = 200000;
    int eval_interval = 5000;
    int eval_episodes = 50;
    RewardMode reward_mode = RewardMode::waypoint;
    sac::SacConfig sac;
};

struct EvalConfig {
    int episodes = 200;
};

// One experiment configuration; serialized as an INI-style file with
// [field], [robot], [sl], [rl], [replan] and [eval] sections.
struct RunConfig {
    FieldSpec field;
    RobotType robot = RobotType::point;
    SlConfig sl;
    RlConfig rl;
    ReplanPolicy replan;
    EvalConfig eval;
};

RunConfig load_run_config(const std::string& path);
void save_run_config(const RunConfig& cfg, const std::string& path);

}  // namespace wpnav
