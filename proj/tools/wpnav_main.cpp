#include <algorithm>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "wpnav/csv.hpp"
#include "wpnav/harness.hpp"
#include "wpnav/plot.hpp"

namespace fs = std::filesystem;
using namespace wpnav;

namespace {

FieldSpec env_by_name(const std::string& name, std::uint64_t rng_seed) {
    for (const FieldSpec& e : generalization_envs(rng_seed)) {
        std::string n = to_string(e.layout);
        if (e.layout == LayoutKind::pillar)
            n = "pillar_" + std::to_string(int(e.width)) + "x" + std::to_string(int(e.height)) +
                "x" + std::to_string(e.obstacle_count);
        if (n == name) return e;
    }
    throw std::runtime_error("unknown environment name: " + name);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wpnav: 2D navigation with a learned waypoint generator and a tracking agent"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    std::uint64_t seed = 0;
    int blas_threads = 1;
    app.add_option("--config", config_path, "run configuration file (INI)");
    app.add_option("--seed", seed, "global seed")->capture_default_str();
    app.add_option("--threads", blas_threads, "BLAS threads")->capture_default_str();

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate a supervised waypoint dataset");
    int gen_count = 1000;
    std::string gen_out = "dataset.wpds";
    std::string gen_layout_file;
    gen->add_option("--count", gen_count, "number of samples")->capture_default_str();
    gen->add_option("--out", gen_out, "output WPDS file")->capture_default_str();
    gen->add_option("--layout-file", gen_layout_file, "field layout file overriding [field]");

    // train-sl
    auto* tsl = app.add_subcommand("train-sl", "train the waypoint generator");
    std::string tsl_data, tsl_out = "sl_run";
    std::string tsl_base;
    int tsl_epochs = -1;
    tsl->add_option("--data", tsl_data, "WPDS dataset")->required();
    tsl->add_option("--out", tsl_out, "output directory")->capture_default_str();
    tsl->add_option("--base-model", tsl_base, "continue from this checkpoint");
    tsl->add_option("--epochs", tsl_epochs, "override [sl] epochs");
    std::int64_t tsl_take = -1;
    tsl->add_option("--take", tsl_take, "train on the first N samples only");

    // train-rl
    auto* trl = app.add_subcommand("train-rl", "train the tracking agent with SAC");
    std::string trl_out = "rl_run", trl_model, trl_mode;
    int trl_steps = -1;
    trl->add_option("--out", trl_out, "output directory")->capture_default_str();
    trl->add_option("--sl-model", trl_model, "waypoint model checkpoint (waypoint mode)");
    trl->add_option("--mode", trl_mode, "waypoint|baseline (overrides [rl] reward_mode)");
    trl->add_option("--total-steps", trl_steps, "override [rl] total_steps");

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate a trained policy");
    std::string ev_policy, ev_model, ev_mode = "waypoint", ev_env = "config", ev_out = "report.csv";
    std::string ev_layout_file, ev_episode_log;
    int ev_episodes = -1;
    ev->add_option("--policy", ev_policy, "policy checkpoint (.nnck)")->required();
    ev->add_option("--sl-model", ev_model, "waypoint model checkpoint (waypoint mode)");
    ev->add_option("--mode", ev_mode, "waypoint|baseline")->capture_default_str();
    ev->add_option("--env", ev_env,
                   "config|gremlin|pillar_3x3x25|pillar_4x4x40|two_room|four_room");
    ev->add_option("--layout-file", ev_layout_file, "field layout file");
    ev->add_option("--episodes", ev_episodes, "override [eval] episodes");
    ev->add_option("--out", ev_out, "output report CSV")->capture_default_str();
    ev->add_option("--episode-log", ev_episode_log, "write the first episode's step log here");

    // finetune
    auto* ft = app.add_subcommand("finetune", "fine-tune the waypoint generator on [field]");
    std::string ft_model, ft_out = "finetuned.nnck";
    int ft_count = 5000, ft_epochs = 10;
    ft->add_option("--model", ft_model, "base model checkpoint")->required();
    ft->add_option("--out", ft_out, "output checkpoint")->capture_default_str();
    ft->add_option("--count", ft_count, "fresh dataset size")->capture_default_str();
    ft->add_option("--epochs", ft_epochs, "fine-tuning epochs")->capture_default_str();
    std::string ft_log;
    ft->add_option("--log", ft_log, "write per-epoch MSE CSV here");

    // replan-study
    auto* rs = app.add_subcommand("replan-study", "train under different replanning frequencies");
    std::string rs_out = "replan_study", rs_model, rs_intervals = "1,5,25,100",
                rs_seeds = "0";
    rs->add_option("--out", rs_out, "output directory")->capture_default_str();
    rs->add_option("--sl-model", rs_model, "waypoint model checkpoint")->required();
    rs->add_option("--intervals", rs_intervals, "fixed replan intervals")->capture_default_str();
    rs->add_option("--seeds", rs_seeds, "training seeds")->capture_default_str();

    // plot
    auto* pl = app.add_subcommand("plot", "render CSV outputs as PNG charts");
    std::string pl_kind = "curves", pl_in, pl_labels, pl_x = "env_step", pl_y = "reach_rate",
                pl_out = "plot.png", pl_title = "";
    pl->add_option("--kind", pl_kind, "curves|bars")->capture_default_str();
    pl->add_option("--in", pl_in, "comma-separated CSV inputs")->required();
    pl->add_option("--labels", pl_labels, "comma-separated series labels");
    pl->add_option("--x", pl_x, "x column (curves)")->capture_default_str();
    pl->add_option("--y", pl_y, "y column (curves) or value column (bars)")
        ->capture_default_str();
    pl->add_option("--out", pl_out, "output PNG")->capture_default_str();
    pl->add_option("--title", pl_title, "chart title");

    CLI11_PARSE(app, argc, argv);
    kernels::set_blas_threads(blas_threads);

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_run_config(config_path);

        if (*gen) {
            if (!gen_layout_file.empty()) cfg.field = load_field_spec(gen_layout_file);
            const SlDataset ds = generate_dataset(cfg.field, cfg.robot, gen_count, seed);
            if (ds.unreachable_warning)
                std::cerr << "warning: more than half of the sampled layouts were unreachable\n";
            save_wpds(ds, gen_out);
            std::cout << "wrote " << ds.count << " samples to " << gen_out << "\n";
        } else if (*tsl) {
            SlDataset ds = load_wpds(tsl_data);
            if (tsl_take > 0) ds = ds.prefix(tsl_take);
            nn::Network<float> model = tsl_base.empty() ? make_waypoint_model(seed)
                                                        : nn::load_network<float>(tsl_base);
            SlTrainParams params{cfg.sl.epochs, cfg.sl.batch, cfg.sl.lr, cfg.sl.val_split, seed};
            if (tsl_epochs >= 0) params.epochs = tsl_epochs;
            const auto rows = train_waypoint_model(model, ds, params);
            fs::create_directories(tsl_out);
            nn::save_network(model, tsl_out + "/model.nnck");
            write_sl_log(rows, tsl_out + "/sl_log.csv");
            if (!rows.empty())
                std::cout << "final train_mse=" << rows.back().train_mse
                          << " val_mse=" << rows.back().val_mse << "\n";
        } else if (*trl) {
            if (!trl_mode.empty()) {
                auto m = reward_mode_from_string(trl_mode);
                if (!m) throw std::runtime_error("unknown mode " + trl_mode);
                cfg.rl.reward_mode = *m;
            }
            if (trl_steps > 0) cfg.rl.total_steps = trl_steps;
            nn::Network<float> model;
            nn::Network<float>* model_ptr = nullptr;
            if (cfg.rl.reward_mode == RewardMode::waypoint) {
                if (trl_model.empty())
                    throw std::runtime_error("train-rl: --sl-model required in waypoint mode");
                model = nn::load_network<float>(trl_model);
                model_ptr = &model;
            }
            const TrainRlResult res = train_rl(cfg, seed, trl_out, model_ptr);
            std::cout << "final reach_rate=" << res.final_reach_rate
                      << " best=" << res.best_reach_rate << " at step " << res.best_step << "\n";
        } else if (*ev) {
            auto m = reward_mode_from_string(ev_mode);
            if (!m) throw std::runtime_error("unknown mode " + ev_mode);
            FieldSpec field = cfg.field;
            if (!ev_layout_file.empty()) field = load_field_spec(ev_layout_file);
            else if (ev_env != "config") field = env_by_name(ev_env, cfg.field.rng_seed);
            const int episodes = ev_episodes > 0 ? ev_episodes : cfg.eval.episodes;

            sac::SacConfig scfg = cfg.rl.sac;
            sac::GaussianPolicy<float> policy(observation_dim(*m), 2, scfg.hidden,
                                              scfg.log_std_min, scfg.log_std_max);
            policy.net = nn::load_network<float>(ev_policy);
            nn::Network<float> model;
            std::optional<CnnWaypointSource> source;
            if (*m == RewardMode::waypoint) {
                if (ev_model.empty())
                    throw std::runtime_error("eval: --sl-model required in waypoint mode");
                model = nn::load_network<float>(ev_model);
                source.emplace(model);
            }
            const EvalStats st =
                evaluate_policy(field, cfg.robot, policy, *m, source ? &*source : nullptr,
                                cfg.replan, episodes, Rng::mix(kEvalLayoutTag, seed));
            std::vector<EvalRow> rows;
            EvalRow row;
            row.env = ev_env;
            row.method = ev_mode;
            row.reach_rate = st.reach_rate;
            row.steps_to_goal = st.mean_steps_reached;
            row.mean_collisions = st.mean_collisions;
            row.reached_count = st.reached_count;
            row.episodes = st.episodes;
            rows.push_back(row);
            write_eval_report(rows, ev_out);
            std::cout << "reach_rate=" << st.reach_rate << " steps=" << st.mean_steps_reached
                      << " collisions=" << st.mean_collisions << "\n";
            if (!ev_episode_log.empty()) {
                World world(field, cfg.robot);
                std::vector<EpisodeLogRow> log;
                run_episode(world, policy, *m, source ? &*source : nullptr, cfg.replan,
                            Rng::mix(kEvalLayoutTag, seed), &log);
                write_episode_log(log, ev_episode_log);
            }
        } else if (*ft) {
            nn::Network<float> model = nn::load_network<float>(ft_model);
            SlTrainParams params{ft_epochs, cfg.sl.batch, cfg.sl.lr, cfg.sl.val_split, seed};
            const auto rows =
                finetune_waypoint_model(model, cfg.field, cfg.robot, ft_count, params);
            nn::save_network(model, ft_out);
            if (!ft_log.empty()) write_sl_log(rows, ft_log);
            if (!rows.empty())
                std::cout << "final val_mse=" << rows.back().val_mse << "\n";
        } else if (*rs) {
            nn::Network<float> model = nn::load_network<float>(rs_model);
            std::vector<int> intervals;
            for (const auto& s : split_list(rs_intervals)) intervals.push_back(std::stoi(s));
            std::vector<std::uint64_t> seeds;
            for (const auto& s : split_list(rs_seeds)) seeds.push_back(std::stoull(s));
            const auto rows = replan_frequency_study(cfg, model, intervals, seeds, rs_out);
            CsvWriter csv(rs_out + "/summary.csv",
                          "setting,seed,final_steps_to_goal,final_reach_rate,curve");
            for (const auto& r : rows) {
                csv.field(r.setting).field(static_cast<long long>(r.seed)).field(r.final_steps_to_goal);
                csv.field(r.final_reach_rate).field(r.curve_path);
                csv.end_row();
            }
            std::cout << "study rows: " << rows.size() << "\n";
        } else if (*pl) {
            const auto files = split_list(pl_in);
            auto labels = split_list(pl_labels);
            while (labels.size() < files.size())
                labels.push_back("series" + std::to_string(labels.size()));
            if (pl_kind == "curves") {
                std::vector<Series> series;
                for (size_t i = 0; i < files.size(); ++i) {
                    const auto rows = read_csv(files[i]);
                    series.push_back({labels[i], csv_column(rows, pl_x), csv_column(rows, pl_y)});
                }
                plot_lines(series, pl_title.empty() ? pl_y : pl_title, pl_x, pl_y, pl_out);
            } else if (pl_kind == "bars") {
                // expects an eval report: env,method,<value columns>
                const auto rows = read_csv(files[0]);
                std::vector<std::string> methods;
                std::vector<BarGroup> groups;
                for (size_t r = 1; r < rows.size(); ++r) {
                    const std::string& env = rows[r][0];
                    const std::string& method = rows[r][1];
                    if (std::find(methods.begin(), methods.end(), method) == methods.end())
                        methods.push_back(method);
                    if (groups.empty() || groups.back().label != env)
                        groups.push_back({env, {}});
                }
                const auto vals = csv_column(rows, pl_y);
                size_t v = 0;
                for (auto& g : groups)
                    for (size_t k = 0; k < methods.size() && v < vals.size(); ++k)
                        g.values.push_back(vals[v++]);
                plot_bars(groups, methods, pl_title.empty() ? pl_y : pl_title, pl_y, pl_out);
            } else {
                throw std::runtime_error("plot: unknown kind " + pl_kind);
            }
            std::cout << "wrote " << pl_out << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
