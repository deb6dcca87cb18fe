#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wpnav/nn.hpp"
#include "wpnav/planner.hpp"
#include "wpnav/replan.hpp"
#include "wpnav/world.hpp"
#include "wpnav/wpds.hpp"

namespace wpnav {

// Planning-pipeline knobs shared by dataset generation and oracle waypoints.
// The planning grid is finer than the 0.1 m image grid and padded by half a
// cell diagonal so any segment through free cells is collision-free for the
// robot body in continuous space.
struct PlannerPipeline {
    double image_resolution = 0.1;
    double plan_resolution = 0.05;
    int smooth_iterations = 100;
    double plan_extra_inflation() const { return plan_resolution * std::sqrt(2.0) / 2.0; }
};

// conv 3x3x32 s2 -> conv 3x3x64 s2 -> conv 3x3x64 s2 -> GAP -> FC 256 -> FC 20
nn::Network<float> make_waypoint_model(std::uint64_t seed);

// Random layout -> plan -> smooth -> label -> encode, per sample; unreachable
// layouts are discarded and resampled. Deterministic in seed (samples use
// independent substreams, so generation parallelizes).
SlDataset generate_dataset(const FieldSpec& spec, RobotType robot, int count, std::uint64_t seed,
                           const PlannerPipeline& pipeline = {});

struct SlTrainParams {
    int epochs = 30;
    int batch = 64;
    double lr = 3e-4;
    double val_split = 0.1;
    std::uint64_t seed = 0;
};

struct SlEpochRow {
    int epoch;
    double train_mse;
    double val_mse;
};

// Minimizes the mean over samples of the squared L2 error of the 20-value
// waypoint vector, with Adam. Returns per-epoch train/validation MSE.
std::vector<SlEpochRow> train_waypoint_model(nn::Network<float>& model, const SlDataset& dataset,
                                             const SlTrainParams& params);

// fresh dataset from new_spec, then continued training; zero epochs is a no-op
std::vector<SlEpochRow> finetune_waypoint_model(nn::Network<float>& model,
                                                const FieldSpec& new_spec, RobotType robot,
                                                int count, const SlTrainParams& params,
                                                const PlannerPipeline& pipeline = {});

struct WaypointPrediction {
    std::vector<Vec2> world;  // kWaypointCount points
    std::vector<Vec2> ego;    // robot-egocentric at prediction time
};

GoseloImage encode_current(const World& world, const GoseloFrame& frame,
                           const PlannerPipeline& pipeline = {});

WaypointPrediction predict_waypoints(nn::Network<float>& model, const GoseloImage& image,
                                     const GoseloFrame& frame, Vec2 agent_pos,
                                     double agent_heading);

// Where waypoints come from during rollouts: the trained CNN, or the grid
// planner itself (the oracle the CNN imitates).
class WaypointSource {
public:
    virtual ~WaypointSource() = default;
    // world-frame waypoints for the current world state, or nullopt if the
    // source cannot produce a path (oracle on an unreachable layout)
    virtual std::optional<std::vector<Vec2>> waypoints(const World& world) = 0;
};

class CnnWaypointSource final : public WaypointSource {
public:
    CnnWaypointSource(nn::Network<float>& model, PlannerPipeline pipeline = {})
        : model_(model), pipeline_(pipeline) {}
    std::optional<std::vector<Vec2>> waypoints(const World& world) override;

private:
    nn::Network<float>& model_;
    PlannerPipeline pipeline_;
};

class OracleWaypointSource final : public WaypointSource {
public:
    explicit OracleWaypointSource(PlannerPipeline pipeline = {}, std::uint64_t seed = 0)
        : pipeline_(pipeline), seed_(seed) {}
    std::optional<std::vector<Vec2>> waypoints(const World& world) override;

private:
    PlannerPipeline pipeline_;
    std::uint64_t seed_;
    std::uint64_t calls_ = 0;
};

struct GreedyFollowResult {
    double collisions_per_episode = 0.0;
    double reach_rate = 0.0;
    double mean_steps = 0.0;
    int episodes = 0;
};

// Teleport-follow evaluation: each step the agent jumps to the waypoint after
// the one nearest to it, continuous-space collisions are counted along the
// jump segment, and replanning follows `policy`.
GreedyFollowResult eval_greedy_follow(WaypointSource& source, const FieldSpec& spec,
                                      RobotType robot, int episodes, std::uint64_t seed,
                                      const ReplanPolicy& policy = ReplanPolicy::rule_based(),
                                      const PlannerPipeline& pipeline = {});

}  // namespace wpnav
