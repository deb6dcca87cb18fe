#include "wpnav/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace wpnav {

const char* to_string(RewardMode m) {
    return m == RewardMode::waypoint ? "waypoint" : "baseline";
}

std::optional<RewardMode> reward_mode_from_string(const std::string& s) {
    if (s == "waypoint") return RewardMode::waypoint;
    if (s == "baseline") return RewardMode::baseline;
    return std::nullopt;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

using KeyHandler = std::function<void(const std::string&)>;

}  // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);

    RunConfig cfg;
    std::map<std::string, KeyHandler> handlers = {
        {"field.width", [&](const std::string& v) { cfg.field.width = std::stod(v); }},
        {"field.height", [&](const std::string& v) { cfg.field.height = std::stod(v); }},
        {"field.obstacle_count",
         [&](const std::string& v) { cfg.field.obstacle_count = std::stoi(v); }},
        {"field.layout",
         [&](const std::string& v) {
             auto k = layout_from_string(v);
             if (!k) throw std::runtime_error("config: unknown layout " + v);
             cfg.field.layout = *k;
         }},
        {"field.rng_seed", [&](const std::string& v) { cfg.field.rng_seed = std::stoull(v); }},
        {"robot.type",
         [&](const std::string& v) {
             auto r = robot_from_string(v);
             if (!r) throw std::runtime_error("config: unknown robot type " + v);
             cfg.robot = *r;
         }},
        {"sl.dataset_count", [&](const std::string& v) { cfg.sl.dataset_count = std::stoi(v); }},
        {"sl.epochs", [&](const std::string& v) { cfg.sl.epochs = std::stoi(v); }},
        {"sl.batch", [&](const std::string& v) { cfg.sl.batch = std::stoi(v); }},
        {"sl.lr", [&](const std::string& v) { cfg.sl.lr = std::stod(v); }},
        {"sl.val_split", [&](const std::string& v) { cfg.sl.val_split = std::stod(v); }},
        {"rl.total_steps", [&](const std::string& v) { cfg.rl.total_steps = std::stoi(v); }},
        {"rl.eval_interval", [&](const std::string& v) { cfg.rl.eval_interval = std::stoi(v); }},
        {"rl.eval_episodes", [&](const std::string& v) { cfg.rl.eval_episodes = std::stoi(v); }},
        {"rl.reward_mode",
         [&](const std::string& v) {
             auto m = reward_mode_from_string(v);
             if (!m) throw std::runtime_error("config: unknown reward mode " + v);
             cfg.rl.reward_mode = *m;
         }},
        {"rl.lr", [&](const std::string& v) { cfg.rl.sac.lr = std::stod(v); }},
        {"rl.batch", [&](const std::string& v) { cfg.rl.sac.batch_size = std::stoi(v); }},
        {"rl.gamma", [&](const std::string& v) { cfg.rl.sac.gamma = std::stod(v); }},
        {"rl.tau", [&](const std::string& v) { cfg.rl.sac.tau = std::stod(v); }},
        {"rl.buffer_capacity",
         [&](const std::string& v) { cfg.rl.sac.buffer_capacity = std::stoi(v); }},
        {"rl.warmup_steps", [&](const std::string& v) { cfg.rl.sac.warmup_steps = std::stoi(v); }},
        {"rl.hidden", [&](const std::string& v) { cfg.rl.sac.hidden = std::stoi(v); }},
        {"replan.mode",
         [&](const std::string& v) {
             if (v == "rule_based") cfg.replan.mode = ReplanPolicy::Mode::rule_based;
             else if (v == "fixed_interval") cfg.replan.mode = ReplanPolicy::Mode::fixed_interval;
             else throw std::runtime_error("config: unknown replan mode " + v);
         }},
        {"replan.d_update", [&](const std::string& v) { cfg.replan.d_update = std::stod(v); }},
        {"replan.fixed_interval",
         [&](const std::string& v) { cfg.replan.interval = std::stoi(v); }},
        {"eval.episodes", [&](const std::string& v) { cfg.eval.episodes = std::stoi(v); }},
    };

    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const auto it = handlers.find(key);
        if (it == handlers.end())
            throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key " +
                                     key);
        it->second(val);
    }
    cfg.field.validate();
    return cfg;
}

void save_run_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << "[field]\n"
        << "width = " << cfg.field.width << "\n"
        << "height = " << cfg.field.height << "\n"
        << "obstacle_count = " << cfg.field.obstacle_count << "\n"
        << "layout = " << to_string(cfg.field.layout) << "\n"
        << "rng_seed = " << cfg.field.rng_seed << "\n\n";
    out << "[robot]\n"
        << "type = " << to_string(cfg.robot) << "\n\n";
    out << "[sl]\n"
        << "dataset_count = " << cfg.sl.dataset_count << "\n"
        << "epochs = " << cfg.sl.epochs << "\n"
        << "batch = " << cfg.sl.batch << "\n"
        << "lr = " << cfg.sl.lr << "\n"
        << "val_split = " << cfg.sl.val_split << "\n\n";
    out << "[rl]\n"
        << "total_steps = " << cfg.rl.total_steps << "\n"
        << "eval_interval = " << cfg.rl.eval_interval << "\n"
        << "eval_episodes = " << cfg.rl.eval_episodes << "\n"
        << "reward_mode = " << to_string(cfg.rl.reward_mode) << "\n"
        << "lr = " << cfg.rl.sac.lr << "\n"
        << "batch = " << cfg.rl.sac.batch_size << "\n"
        << "gamma = " << cfg.rl.sac.gamma << "\n"
        << "tau = " << cfg.rl.sac.tau << "\n"
        << "buffer_capacity = " << cfg.rl.sac.buffer_capacity << "\n"
        << "warmup_steps = " << cfg.rl.sac.warmup_steps << "\n"
        << "hidden = " << cfg.rl.sac.hidden << "\n\n";
    out << "[replan]\n"
        << "mode = "
        << (cfg.replan.mode == ReplanPolicy::Mode::rule_based ? "rule_based" : "fixed_interval")
        << "\n"
        << "d_update = " << cfg.replan.d_update << "\n"
        << "fixed_interval = " << cfg.replan.interval << "\n\n";
    out << "[eval]\n"
        << "episodes = " << cfg.eval.episodes << "\n";
}

}  // namespace wpnav
