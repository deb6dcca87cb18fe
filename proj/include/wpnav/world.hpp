#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wpnav/common.hpp"
#include "wpnav/occupancy.hpp"

namespace wpnav {

enum class LayoutKind { pillar, gremlin, two_room, four_room };
enum class RobotType { point, car };
enum class TerminationCause { none, goal, out_of_bounds, timeout };

const char* to_string(LayoutKind k);
const char* to_string(RobotType t);
const char* to_string(TerminationCause c);
std::optional<LayoutKind> layout_from_string(const std::string& s);
std::optional<RobotType> robot_from_string(const std::string& s);

struct FieldSpec {
    double width = 2.0;
    double height = 2.0;
    int obstacle_count = 10;
    LayoutKind layout = LayoutKind::pillar;
    std::uint64_t rng_seed = 0;

    void validate() const;  // throws std::invalid_argument
};

struct Obstacle {
    enum class Shape { disk, axis_box };
    Shape shape = Shape::disk;
    Vec2 center;
    double radius = 0.0;      // disk
    Vec2 half_extents;        // axis_box
    // circular-orbit descriptor for moving obstacles ("gremlins")
    bool orbiting = false;
    Vec2 orbit_center;
    double orbit_radius = 0.0;
    double angular_speed = 0.0;  // rad per control step
    double orbit_phase = 0.0;

    // circumscribed radius, used for placement clearance
    double extent() const {
        return shape == Shape::disk ? radius : half_extents.norm();
    }
    // distance from a point to the obstacle surface (negative inside)
    double surface_distance(Vec2 p) const;
};

struct RobotState {
    Vec2 position;
    double heading = 0.0;  // wrapped to (-pi, pi]
    Vec2 velocity;         // world frame, meters per second
    double angular_velocity = 0.0;
    double body_radius = 0.1;
    double forward_speed = 0.0;  // signed speed along heading
};

struct Observation {
    std::array<double, 5> proprio{};  // sin(h), cos(h), v_fwd, v_lat, omega
    std::array<double, 10> lidar{};
    Vec2 goal_rel;  // goal location relative to the agent (world frame)
};

struct StepOutcome {
    Observation next_observation;
    double reward_task = 0.0;  // f(s,a) = w3*collided + w4*goal
    bool collided = false;
    bool reached_goal = false;
    bool terminated = false;
    TerminationCause termination_cause = TerminationCause::none;
};

// Geometry and dynamics constants. The paper delegates dynamics to the
// physics engine; these values define the reduced desk-scale robots.
struct WorldParams {
    double dt = 0.1;
    double max_speed = 1.0;
    double point_accel_max = 1.0;   // m/s^2
    double point_turn_max = 2.0;    // rad/s
    double car_wheel_base = 0.2;    // m
    double point_body_radius = 0.1;
    double car_body_radius = 0.12;
    double pillar_radius = 0.1;
    double gremlin_half_extent = 0.1;
    int gremlin_count = 4;
    double gremlin_orbit_radius = 0.3;
    double gremlin_angular_speed = 0.05;  // rad/step
    double wall_thickness = 0.06;
    double door_width = 0.4;
    double goal_radius = 0.3;       // reach threshold
    double min_goal_agent_dist = 0.5;
    double placement_margin = 0.05;
    double lidar_range = 3.0;
    int max_placement_samples = 10000;
};

class World {
public:
    World(FieldSpec spec, RobotType robot, WorldParams params = {});

    // Places agent, goal and obstacles; deterministic in (spec, seed).
    // Throws LayoutError if placement fails after the sample budget.
    Observation reset(std::uint64_t seed);

    // Integrates one control step. Action layout:
    //   point: [forward acceleration, turn rate]   (both in [-1, 1])
    //   car:   [left wheel speed, right wheel speed]
    StepOutcome step(std::span<const double> action);

    std::array<double, 10> raycast_lidar() const;

    // Binary occupancy at cell centers, obstacles inflated by
    // body_radius + extra_inflation, plus the visit raster binned from the
    // agent's position history this episode.
    OccupancyGrid rasterize(double resolution, double extra_inflation = 0.0) const;

    // True if a robot body disk at p penetrates any obstacle.
    bool body_collides(Vec2 p) const;

    // Moves the robot without dynamics (teleport-follow evaluation); the
    // position is recorded in the visit history.
    void teleport_robot(Vec2 p);

    // Replaces agent pose, goal and obstacles with a hand-built scene and
    // restarts the episode. Intended for tests and debugging.
    struct DebugScene {
        Vec2 agent;
        double heading = 0.0;
        Vec2 goal;
        std::vector<Obstacle> obstacles;
    };
    void load_debug_scene(const DebugScene& scene);

    // robot position after integration but before collision resolution
    Vec2 last_unresolved_position() const { return last_unresolved_; }

    const FieldSpec& spec() const { return spec_; }
    RobotType robot_type() const { return robot_type_; }
    const WorldParams& params() const { return params_; }
    const RobotState& robot() const { return robot_; }
    Vec2 goal() const { return goal_; }
    const std::vector<Obstacle>& obstacles() const { return obstacles_; }
    int step_count() const { return step_count_; }
    int step_limit() const { return step_limit_; }
    bool terminated() const { return cause_ != TerminationCause::none; }
    TerminationCause termination_cause() const { return cause_; }
    int action_dim() const { return 2; }
    const std::vector<Vec2>& position_history() const { return history_; }

    Observation observe() const;

private:
    void build_walls();
    void place_random(Rng& rng);
    bool clear_of_obstacles(Vec2 p, double clearance_radius) const;
    void integrate(std::span<const double> action);
    void advance_gremlins();
    Vec2 resolve_collision(Vec2 prev, Vec2 next, bool& collided) const;

    FieldSpec spec_;
    RobotType robot_type_;
    WorldParams params_;
    RobotState robot_;
    Vec2 goal_;
    std::vector<Obstacle> obstacles_;  // walls first, then sampled obstacles
    std::vector<Vec2> history_;
    Vec2 last_unresolved_;
    int step_count_ = 0;
    int step_limit_ = 0;
    TerminationCause cause_ = TerminationCause::none;
};

// Key-value layout file (one "key = value" per line) describing a FieldSpec.
FieldSpec load_field_spec(const std::string& path);
void save_field_spec(const FieldSpec& spec, const std::string& path);

}  // namespace wpnav
