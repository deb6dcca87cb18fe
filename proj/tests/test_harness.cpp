#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "wpnav/harness.hpp"
#include "wpnav/plot.hpp"

using namespace wpnav;

namespace {

sac::GaussianPolicy<float> tiny_policy(int obs_dim, std::uint64_t seed) {
    sac::GaussianPolicy<float> p(obs_dim, 2, 8, -20.0, 2.0);
    Rng rng(seed);
    p.net.init_he_uniform(rng);
    return p;
}

}  // namespace

TEST(Observation, Dimensions) {
    EXPECT_EQ(observation_dim(RewardMode::waypoint), 35);
    EXPECT_EQ(observation_dim(RewardMode::baseline), 17);
}

TEST(Observation, EgocentricWaypointRotation) {
    Observation obs;
    RobotState robot;
    robot.position = {1.0, 1.0};
    robot.heading = M_PI / 2.0;  // facing north
    std::vector<Vec2> wps(kWaypointCount, Vec2{1.0, 2.0});  // 1 m north of the agent
    std::vector<float> x;
    build_observation(obs, robot, wps, RewardMode::waypoint, x);
    ASSERT_EQ(x.size(), 35u);
    // facing north, a waypoint due north sits straight ahead: ego = (1, 0)
    EXPECT_NEAR(x[15], 1.0f, 1e-6);
    EXPECT_NEAR(x[16], 0.0f, 1e-6);
}

TEST(Observation, BaselineGoalRelative) {
    Observation obs;
    obs.goal_rel = {0.3, -0.4};
    RobotState robot;
    std::vector<float> x;
    build_observation(obs, robot, {}, RewardMode::baseline, x);
    ASSERT_EQ(x.size(), 17u);
    EXPECT_EQ(x[15], 0.3f);
    EXPECT_EQ(x[16], -0.4f);
}

TEST(Tracker, ReplansOnEpisodeStartAndFallsBackToStraightLine) {
    World world(FieldSpec{2, 2, 0, LayoutKind::pillar, 0}, RobotType::point);
    world.reset(3);
    WaypointTracker tracker(nullptr, ReplanPolicy::rule_based());
    tracker.start_episode(world);
    EXPECT_EQ(tracker.replan_count(), 1);
    ASSERT_EQ(tracker.waypoints().size(), size_t(kWaypointCount));
    // fallback is a straight march toward the goal at label spacing
    const Vec2 p = world.robot().position;
    const Vec2 g = world.goal();
    const Vec2 dir = (g - p) * (1.0 / dist(g, p));
    const Vec2 expect = p + dir * kLabelSpacing;
    EXPECT_NEAR(tracker.waypoints()[0].x, expect.x, 1e-9);
    EXPECT_NEAR(tracker.waypoints()[0].y, expect.y, 1e-9);
}

TEST(Tracker, RuleFiresAfterDeviation) {
    World world(FieldSpec{2, 2, 0, LayoutKind::pillar, 0}, RobotType::point);
    world.reset(5);
    WaypointTracker tracker(nullptr, ReplanPolicy::rule_based(0.3));
    tracker.start_episode(world);
    const Vec2 start = world.robot().position;
    // drift 0.35 m perpendicular to the reference: d_path > d_update
    const Vec2 g = world.goal();
    Vec2 dir = g - start;
    dir = dir * (1.0 / dir.norm());
    const Vec2 off{-dir.y, dir.x};
    const auto ev = tracker.after_step(world, start, start + off * 0.35);
    EXPECT_GT(ev.d_path, 0.3);
    EXPECT_TRUE(ev.replanned);
    EXPECT_EQ(tracker.replan_count(), 2);
}

TEST(RunEpisode, BaselineTerminatesWithinCap) {
    World world(FieldSpec{2, 2, 3, LayoutKind::pillar, 0}, RobotType::point);
    auto policy = tiny_policy(observation_dim(RewardMode::baseline), 7);
    std::vector<EpisodeLogRow> log;
    const auto stats = run_episode(world, policy, RewardMode::baseline, nullptr,
                                   ReplanPolicy::rule_based(), 11, &log);
    EXPECT_GT(stats.steps, 0);
    EXPECT_LE(stats.steps, world.step_limit());
    EXPECT_EQ(int(log.size()), stats.steps);
    EXPECT_NE(stats.cause, TerminationCause::none);
    if (stats.reached) EXPECT_EQ(stats.cause, TerminationCause::goal);
    // baseline return accumulates the goal-distance penalty
    EXPECT_LT(stats.baseline_return, 0.0);
}

TEST(RunEpisode, WaypointModeWithOracleSource) {
    World world(FieldSpec{2, 2, 4, LayoutKind::pillar, 0}, RobotType::point);
    auto policy = tiny_policy(observation_dim(RewardMode::waypoint), 8);
    OracleWaypointSource oracle({}, 1);
    const auto stats = run_episode(world, policy, RewardMode::waypoint, &oracle,
                                   ReplanPolicy::rule_based(), 13);
    EXPECT_GT(stats.steps, 0);
    EXPECT_NE(stats.cause, TerminationCause::none);
}

TEST(EvaluatePolicy, DeterministicAndZeroEpisodeSafe) {
    const FieldSpec spec{2, 2, 3, LayoutKind::pillar, 0};
    auto policy = tiny_policy(observation_dim(RewardMode::baseline), 9);
    const auto a = evaluate_policy(spec, RobotType::point, policy, RewardMode::baseline, nullptr,
                                   ReplanPolicy::rule_based(), 5);
    const auto b = evaluate_policy(spec, RobotType::point, policy, RewardMode::baseline, nullptr,
                                   ReplanPolicy::rule_based(), 5);
    EXPECT_EQ(a.mean_return, b.mean_return);
    EXPECT_EQ(a.reach_rate, b.reach_rate);
    EXPECT_EQ(a.mean_steps_to_goal, b.mean_steps_to_goal);

    const auto z = evaluate_policy(spec, RobotType::point, policy, RewardMode::baseline, nullptr,
                                   ReplanPolicy::rule_based(), 0);
    EXPECT_EQ(z.episodes, 0);
    EXPECT_EQ(z.reach_rate, 0.0);
    EXPECT_EQ(z.reached_count, 0);
}

TEST(Tracker, EveryStepReplanNeverWorseThanRule) {
    // identical scripted trajectory under both policies; replanning every
    // step can only keep the reference fresher
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        double sum_rule = 0.0, sum_every = 0.0;
        for (int variant = 0; variant < 2; ++variant) {
            World world(FieldSpec{2, 2, 5, LayoutKind::pillar, 0}, RobotType::point);
            world.reset(seed);
            OracleWaypointSource oracle({}, 42);
            WaypointTracker tracker(&oracle, variant == 0 ? ReplanPolicy::rule_based()
                                                          : ReplanPolicy::fixed(1));
            tracker.start_episode(world);
            double acc = 0.0;
            for (int t = 0; t < 50 && !world.terminated(); ++t) {
                const Vec2 prev = world.robot().position;
                world.step(std::vector<double>{0.8, 0.2});
                const auto ev = tracker.after_step(world, prev, world.robot().position);
                acc += ev.d_path;
            }
            (variant == 0 ? sum_rule : sum_every) = acc;
        }
        EXPECT_LE(sum_every, sum_rule + 1e-9) << "seed " << seed;
    }
}

TEST(Report, CsvColumnsAndRows) {
    std::vector<EvalRow> rows;
    rows.push_back({"two_room", "baseline", 0.5, 123.0, 1.5, 100, 200});
    rows.push_back({"two_room", "ours", 0.9, 80.0, 0.5, 180, 200});
    const auto tmp = std::filesystem::temp_directory_path() / "wpnav_report_test.csv";
    write_eval_report(rows, tmp.string());
    std::ifstream in(tmp);
    std::string header, r1, r2;
    std::getline(in, header);
    std::getline(in, r1);
    std::getline(in, r2);
    EXPECT_EQ(header, "env,method,reach_rate,steps_to_goal,mean_collisions,reached,episodes");
    EXPECT_EQ(r1, "two_room,baseline,0.5,123,1.5,100,200");
    EXPECT_EQ(r2, "two_room,ours,0.9,80,0.5,180,200");
    std::filesystem::remove(tmp);
}

TEST(Report, EpisodeLogColumns) {
    std::vector<EpisodeLogRow> rows{{1, 0.5, 0.6, 0.1, -0.2, 0, TerminationCause::none},
                                    {2, 0.52, 0.62, 0.1, 1.0, 1, TerminationCause::goal}};
    const auto tmp = std::filesystem::temp_directory_path() / "wpnav_episode_log.csv";
    write_episode_log(rows, tmp.string());
    std::ifstream in(tmp);
    std::string header, line;
    std::getline(in, header);
    EXPECT_EQ(header, "step,x,y,theta,reward,collided,cause");
    std::getline(in, line);
    EXPECT_EQ(line, "1,0.5,0.6,0.1,-0.2,0,none");
    std::getline(in, line);
    EXPECT_EQ(line, "2,0.52,0.62,0.1,1,1,goal");
    std::filesystem::remove(tmp);
}

TEST(Plot, WritesValidPngs) {
    const auto dir = std::filesystem::temp_directory_path() / "wpnav_plots";
    std::filesystem::create_directories(dir);
    std::vector<Series> series{{"waypoint", {0, 1000, 2000}, {0.1, 0.5, 0.9}},
                               {"baseline", {0, 1000, 2000}, {0.1, 0.2, 0.4}}};
    const auto curves = (dir / "curves.png").string();
    plot_lines(series, "reach rate", "env_step", "reach_rate", curves);
    std::vector<BarGroup> groups{{"two_room", {0.4, 0.95}}, {"four_room", {0.6, 0.9}}};
    const auto bars = (dir / "bars.png").string();
    plot_bars(groups, {"baseline", "ours"}, "reach rate", "reach_rate", bars);
    for (const auto& p : {curves, bars}) {
        std::ifstream in(p, std::ios::binary);
        ASSERT_TRUE(in.good()) << p;
        unsigned char sig[8];
        in.read(reinterpret_cast<char*>(sig), 8);
        EXPECT_EQ(sig[0], 137);
        EXPECT_EQ(sig[1], 'P');
        EXPECT_EQ(sig[2], 'N');
        EXPECT_EQ(sig[3], 'G');
        in.seekg(0, std::ios::end);
        EXPECT_GT(in.tellg(), 1000);  // non-trivial content
    }
    std::filesystem::remove_all(dir);
}

TEST(Generalization, EnvListMatchesEvaluationSetup) {
    const auto envs = generalization_envs(0);
    ASSERT_EQ(envs.size(), 5u);
    EXPECT_EQ(envs[0].layout, LayoutKind::gremlin);
    EXPECT_EQ(envs[1].width, 3.0);
    EXPECT_EQ(envs[1].obstacle_count, 25);
    EXPECT_EQ(envs[2].width, 4.0);
    EXPECT_EQ(envs[2].obstacle_count, 40);
    EXPECT_EQ(envs[3].layout, LayoutKind::two_room);
    EXPECT_EQ(envs[4].layout, LayoutKind::four_room);
}

TEST(Generalization, SuiteProducesFiveByThreeRows) {
    // tiny episode count keeps this a contract test, not a performance test
    auto baseline = tiny_policy(observation_dim(RewardMode::baseline), 31);
    auto waypoint = tiny_policy(observation_dim(RewardMode::waypoint), 32);
    auto model = make_waypoint_model(33);
    std::vector<nn::Network<float>> finetuned;
    const auto envs = generalization_envs(0);
    for (size_t i = 0; i < envs.size(); ++i) finetuned.push_back(model);
    const auto rows = generalization_suite(baseline, waypoint, model, finetuned, envs,
                                           RobotType::point, ReplanPolicy::rule_based(), 2);
    ASSERT_EQ(rows.size(), 15u);
    for (size_t i = 0; i < rows.size(); i += 3) {
        EXPECT_EQ(rows[i].method, "baseline");
        EXPECT_EQ(rows[i + 1].method, "ours");
        EXPECT_EQ(rows[i + 2].method, "ours_finetuned");
        EXPECT_EQ(rows[i].episodes, 2);
    }
}
