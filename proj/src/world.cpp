#include "wpnav/world.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

namespace wpnav {

namespace {

// Table-V task reward coefficients
constexpr double kCollisionPenalty = -1.0;  // w3
constexpr double kGoalReward = 1.0;         // w4

// Door centers snap to 0.1 m cell centers so rasterized walls keep the
// doorway open.
double door_center(double v) { return std::round(v / 0.1) * 0.1 + 0.05; }

}  // namespace

const char* to_string(LayoutKind k) {
    switch (k) {
        case LayoutKind::pillar: return "pillar";
        case LayoutKind::gremlin: return "gremlin";
        case LayoutKind::two_room: return "two_room";
        case LayoutKind::four_room: return "four_room";
    }
    return "?";
}

const char* to_string(RobotType t) {
    return t == RobotType::point ? "point" : "car";
}

const char* to_string(TerminationCause c) {
    switch (c) {
        case TerminationCause::none: return "none";
        case TerminationCause::goal: return "goal";
        case TerminationCause::out_of_bounds: return "out_of_bounds";
        case TerminationCause::timeout: return "timeout";
    }
    return "?";
}

std::optional<LayoutKind> layout_from_string(const std::string& s) {
    if (s == "pillar") return LayoutKind::pillar;
    if (s == "gremlin") return LayoutKind::gremlin;
    if (s == "two_room") return LayoutKind::two_room;
    if (s == "four_room") return LayoutKind::four_room;
    return std::nullopt;
}

std::optional<RobotType> robot_from_string(const std::string& s) {
    if (s == "point") return RobotType::point;
    if (s == "car") return RobotType::car;
    return std::nullopt;
}

void FieldSpec::validate() const {
    if (width <= 0.0 || height <= 0.0)
        throw std::invalid_argument("FieldSpec: field dimensions must be positive");
    if (obstacle_count < 0)
        throw std::invalid_argument("FieldSpec: obstacle_count must be >= 0");
}

double Obstacle::surface_distance(Vec2 p) const {
    if (shape == Shape::disk) return dist(p, center) - radius;
    const double qx = std::abs(p.x - center.x) - half_extents.x;
    const double qy = std::abs(p.y - center.y) - half_extents.y;
    const double ox = std::max(qx, 0.0);
    const double oy = std::max(qy, 0.0);
    return std::sqrt(ox * ox + oy * oy) + std::min(std::max(qx, qy), 0.0);
}

World::World(FieldSpec spec, RobotType robot, WorldParams params)
    : spec_(spec), robot_type_(robot), params_(params) {
    spec_.validate();
    step_limit_ = static_cast<int>(std::lround(150.0 * spec_.width));
    if (spec_.layout == LayoutKind::two_room || spec_.layout == LayoutKind::four_room)
        step_limit_ *= 2;
    robot_.body_radius =
        robot == RobotType::point ? params_.point_body_radius : params_.car_body_radius;
}

void World::build_walls() {
    const double W = spec_.width, H = spec_.height;
    const double t2 = params_.wall_thickness / 2.0;
    const double dw2 = params_.door_width / 2.0;
    auto hwall = [&](double x0, double x1, double y) {
        if (x1 - x0 < 1e-9) return;
        Obstacle o;
        o.shape = Obstacle::Shape::axis_box;
        o.center = {(x0 + x1) / 2.0, y};
        o.half_extents = {(x1 - x0) / 2.0, t2};
        obstacles_.push_back(o);
    };
    auto vwall = [&](double y0, double y1, double x) {
        if (y1 - y0 < 1e-9) return;
        Obstacle o;
        o.shape = Obstacle::Shape::axis_box;
        o.center = {x, (y0 + y1) / 2.0};
        o.half_extents = {t2, (y1 - y0) / 2.0};
        obstacles_.push_back(o);
    };
    if (spec_.layout == LayoutKind::two_room) {
        const double d = door_center(W / 4.0);
        hwall(0.0, d - dw2, H / 2.0);
        hwall(d + dw2, W, H / 2.0);
    } else if (spec_.layout == LayoutKind::four_room) {
        const double d1 = door_center(W / 4.0), d2 = door_center(3.0 * W / 4.0);
        hwall(0.0, d1 - dw2, H / 2.0);
        hwall(d1 + dw2, d2 - dw2, H / 2.0);
        hwall(d2 + dw2, W, H / 2.0);
        const double e1 = door_center(H / 4.0), e2 = door_center(3.0 * H / 4.0);
        vwall(0.0, e1 - dw2, W / 2.0);
        vwall(e1 + dw2, e2 - dw2, W / 2.0);
        vwall(e2 + dw2, H, W / 2.0);
    }
}

bool World::clear_of_obstacles(Vec2 p, double clearance_radius) const {
    for (const auto& o : obstacles_)
        if (o.surface_distance(p) < clearance_radius) return false;
    return true;
}

Observation World::reset(std::uint64_t seed) {
    obstacles_.clear();
    history_.clear();
    step_count_ = 0;
    cause_ = TerminationCause::none;

    Rng rng(Rng::mix(spec_.rng_seed, seed));
    build_walls();
    place_random(rng);

    robot_.velocity = {0.0, 0.0};
    robot_.forward_speed = 0.0;
    robot_.angular_velocity = 0.0;
    history_.push_back(robot_.position);
    return observe();
}

void World::place_random(Rng& rng) {
    const double W = spec_.width, H = spec_.height;
    const double margin = params_.placement_margin;
    int budget = params_.max_placement_samples;

    auto sample_in = [&](double inset) -> Vec2 {
        return {rng.uniform(inset, W - inset), rng.uniform(inset, H - inset)};
    };
    auto spend = [&]() {
        if (--budget < 0)
            throw LayoutError("reset: placement failed after " +
                              std::to_string(params_.max_placement_samples) +
                              " rejection samples (unsatisfiable layout)");
    };

    // static pillars
    const double pr = params_.pillar_radius;
    if (pr >= std::min(W, H) / 2.0 && spec_.obstacle_count > 0)
        throw LayoutError("reset: pillar radius does not fit the field");
    for (int i = 0; i < spec_.obstacle_count;) {
        spend();
        Vec2 c = sample_in(pr);
        if (!clear_of_obstacles(c, pr + margin)) continue;
        Obstacle o;
        o.shape = Obstacle::Shape::disk;
        o.center = c;
        o.radius = pr;
        obstacles_.push_back(o);
        ++i;
    }

    // orbiting boxes
    if (spec_.layout == LayoutKind::gremlin) {
        const double ext = params_.gremlin_half_extent * std::sqrt(2.0);
        const double inset = params_.gremlin_orbit_radius + ext;
        if (inset >= std::min(W, H) / 2.0)
            throw LayoutError("reset: gremlin orbit does not fit the field");
        for (int i = 0; i < params_.gremlin_count;) {
            spend();
            Vec2 oc = sample_in(inset);
            Obstacle o;
            o.shape = Obstacle::Shape::axis_box;
            o.half_extents = {params_.gremlin_half_extent, params_.gremlin_half_extent};
            o.orbiting = true;
            o.orbit_center = oc;
            o.orbit_radius = params_.gremlin_orbit_radius;
            o.angular_speed = params_.gremlin_angular_speed;
            o.orbit_phase = rng.uniform(0.0, 2.0 * M_PI);
            o.center = oc + Vec2{std::cos(o.orbit_phase), std::sin(o.orbit_phase)} * o.orbit_radius;
            if (!clear_of_obstacles(o.center, ext + margin)) continue;
            obstacles_.push_back(o);
            ++i;
        }
    }

    // agent, then goal
    const double rb = robot_.body_radius;
    for (;;) {
        spend();
        Vec2 p = sample_in(rb);
        if (!clear_of_obstacles(p, rb + margin)) continue;
        robot_.position = p;
        break;
    }
    robot_.heading = wrap_angle(rng.uniform(-M_PI, M_PI));
    for (;;) {
        spend();
        Vec2 g = sample_in(rb);
        if (!clear_of_obstacles(g, rb + margin)) continue;
        if (dist(g, robot_.position) < params_.min_goal_agent_dist) continue;
        goal_ = g;
        break;
    }
}

Observation World::observe() const {
    Observation obs;
    const double h = robot_.heading;
    const Vec2 dir{std::cos(h), std::sin(h)};
    obs.proprio = {std::sin(h), std::cos(h), robot_.velocity.dot(dir),
                   robot_.velocity.cross(dir), robot_.angular_velocity};
    obs.lidar = raycast_lidar();
    obs.goal_rel = goal_ - robot_.position;
    return obs;
}

void World::advance_gremlins() {
    for (auto& o : obstacles_) {
        if (!o.orbiting) continue;
        o.orbit_phase += o.angular_speed;
        o.center = o.orbit_center +
                   Vec2{std::cos(o.orbit_phase), std::sin(o.orbit_phase)} * o.orbit_radius;
    }
}

void World::integrate(std::span<const double> action) {
    const double dt = params_.dt;
    if (robot_type_ == RobotType::point) {
        const double a = clamp(action[0], -1.0, 1.0) * params_.point_accel_max;
        const double om = clamp(action[1], -1.0, 1.0) * params_.point_turn_max;
        robot_.forward_speed =
            clamp(robot_.forward_speed + a * dt, -params_.max_speed, params_.max_speed);
        robot_.heading = wrap_angle(robot_.heading + om * dt);
        robot_.angular_velocity = om;
    } else {
        const double vl = clamp(action[0], -1.0, 1.0) * params_.max_speed;
        const double vr = clamp(action[1], -1.0, 1.0) * params_.max_speed;
        robot_.forward_speed = clamp((vl + vr) / 2.0, -params_.max_speed, params_.max_speed);
        const double om = (vr - vl) / params_.car_wheel_base;
        robot_.heading = wrap_angle(robot_.heading + om * dt);
        robot_.angular_velocity = om;
    }
    const Vec2 dir{std::cos(robot_.heading), std::sin(robot_.heading)};
    robot_.velocity = dir * robot_.forward_speed;
    robot_.position += robot_.velocity * dt;
}

bool World::body_collides(Vec2 p) const {
    for (const auto& o : obstacles_)
        if (o.surface_distance(p) < robot_.body_radius) return true;
    return false;
}

void World::teleport_robot(Vec2 p) {
    robot_.position = p;
    history_.push_back(p);
}

void World::load_debug_scene(const DebugScene& scene) {
    obstacles_ = scene.obstacles;
    robot_.position = scene.agent;
    robot_.heading = wrap_angle(scene.heading);
    robot_.velocity = {0.0, 0.0};
    robot_.forward_speed = 0.0;
    robot_.angular_velocity = 0.0;
    goal_ = scene.goal;
    history_.assign(1, robot_.position);
    step_count_ = 0;
    cause_ = TerminationCause::none;
}

Vec2 World::resolve_collision(Vec2 prev, Vec2 next, bool& collided) const {
    collided = body_collides(next);
    if (!collided) return next;
    if (!body_collides(prev)) return prev;
    // a moving obstacle reached the resting robot: push out along the
    // deepest penetration normal
    Vec2 p = prev;
    for (int iter = 0; iter < 8 && body_collides(p); ++iter) {
        const Obstacle* worst = nullptr;
        double worst_d = robot_.body_radius;
        for (const auto& o : obstacles_) {
            const double d = o.surface_distance(p);
            if (d < worst_d) {
                worst_d = d;
                worst = &o;
            }
        }
        if (!worst) break;
        Vec2 away = p - worst->center;
        const double n = away.norm();
        if (n < 1e-12) away = {1.0, 0.0};
        else away = away * (1.0 / n);
        p += away * (robot_.body_radius - worst_d + 1e-6);
    }
    return p;
}

StepOutcome World::step(std::span<const double> action) {
    if (cause_ != TerminationCause::none)
        throw std::logic_error("step: episode already terminated");
    if (action.size() != static_cast<size_t>(action_dim()))
        throw std::invalid_argument("step: action dimension mismatch");

    advance_gremlins();
    const Vec2 prev = robot_.position;
    integrate(action);
    last_unresolved_ = robot_.position;

    bool collided = false;
    robot_.position = resolve_collision(prev, robot_.position, collided);
    if (collided) {
        robot_.forward_speed = 0.0;
        robot_.velocity = {0.0, 0.0};
    }

    ++step_count_;
    history_.push_back(robot_.position);

    StepOutcome out;
    out.collided = collided;
    const bool at_goal = dist(robot_.position, goal_) < params_.goal_radius;
    const bool oob = robot_.position.x < 0.0 || robot_.position.x > spec_.width ||
                     robot_.position.y < 0.0 || robot_.position.y > spec_.height;
    if (at_goal) {
        cause_ = TerminationCause::goal;
        out.reached_goal = true;
    } else if (oob) {
        cause_ = TerminationCause::out_of_bounds;
    } else if (step_count_ >= step_limit_) {
        cause_ = TerminationCause::timeout;
    }
    out.terminated = cause_ != TerminationCause::none;
    out.termination_cause = cause_;
    out.reward_task =
        kCollisionPenalty * (collided ? 1.0 : 0.0) + kGoalReward * (out.reached_goal ? 1.0 : 0.0);
    out.next_observation = observe();
    return out;
}

namespace {

// nearest hit distance along a unit ray, or +inf
double ray_disk(Vec2 origin, Vec2 dir, Vec2 center, double radius) {
    const Vec2 oc = origin - center;
    const double b = dir.dot(oc);
    const double c = oc.norm_sq() - radius * radius;
    const double disc = b * b - c;
    if (disc < 0.0) return std::numeric_limits<double>::infinity();
    const double sq = std::sqrt(disc);
    const double t0 = -b - sq;
    if (t0 >= 0.0) return t0;
    const double t1 = -b + sq;
    if (t1 >= 0.0) return 0.0;  // origin inside
    return std::numeric_limits<double>::infinity();
}

double ray_box(Vec2 origin, Vec2 dir, Vec2 center, Vec2 half) {
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();
    const double o[2] = {origin.x - center.x, origin.y - center.y};
    const double d[2] = {dir.x, dir.y};
    const double h[2] = {half.x, half.y};
    for (int i = 0; i < 2; ++i) {
        if (std::abs(d[i]) < 1e-15) {
            if (std::abs(o[i]) > h[i]) return std::numeric_limits<double>::infinity();
            continue;
        }
        double t0 = (-h[i] - o[i]) / d[i];
        double t1 = (h[i] - o[i]) / d[i];
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::max(tmin, t0);
        tmax = std::min(tmax, t1);
    }
    if (tmin > tmax) return std::numeric_limits<double>::infinity();
    if (tmax < 0.0) return std::numeric_limits<double>::infinity();
    return std::max(tmin, 0.0);
}

}  // namespace

std::array<double, 10> World::raycast_lidar() const {
    std::array<double, 10> out{};
    const double dmax = params_.lidar_range;
    for (int k = 0; k < 10; ++k) {
        const double ang = robot_.heading + k * (2.0 * M_PI / 10.0);
        const Vec2 dir{std::cos(ang), std::sin(ang)};
        double best = dmax;
        for (const auto& o : obstacles_) {
            const double t = o.shape == Obstacle::Shape::disk
                                 ? ray_disk(robot_.position, dir, o.center, o.radius)
                                 : ray_box(robot_.position, dir, o.center, o.half_extents);
            best = std::min(best, t);
        }
        out[k] = best / dmax;
    }
    return out;
}

OccupancyGrid World::rasterize(double resolution, double extra_inflation) const {
    if (resolution <= 0.0) throw std::invalid_argument("rasterize: resolution must be > 0");
    OccupancyGrid g;
    g.resolution = resolution;
    g.nx = static_cast<int>(std::ceil(spec_.width / resolution - 1e-9));
    g.ny = static_cast<int>(std::ceil(spec_.height / resolution - 1e-9));
    g.occupied.assign(static_cast<size_t>(g.nx) * g.ny, 0);
    g.visits.assign(static_cast<size_t>(g.nx) * g.ny, 0.0f);

    const double inflate = robot_.body_radius + extra_inflation;
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            const Vec2 c = g.cell_center(ix, iy);
            for (const auto& o : obstacles_) {
                if (o.surface_distance(c) <= inflate) {
                    g.occupied[g.index(ix, iy)] = 1;
                    break;
                }
            }
        }
    }
    for (const Vec2& p : history_) {
        int ix, iy;
        if (g.cell_of(p, ix, iy)) g.visits[g.index(ix, iy)] += 1.0f;
    }
    return g;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

FieldSpec load_field_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open layout file: " + path);
    FieldSpec spec;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("layout file: expected key = value, got: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "width") spec.width = std::stod(val);
        else if (key == "height") spec.height = std::stod(val);
        else if (key == "obstacle_count") spec.obstacle_count = std::stoi(val);
        else if (key == "layout") {
            auto k = layout_from_string(val);
            if (!k) throw std::runtime_error("layout file: unknown layout " + val);
            spec.layout = *k;
        } else if (key == "rng_seed") spec.rng_seed = std::stoull(val);
        else throw std::runtime_error("layout file: unknown key " + key);
    }
    spec.validate();
    return spec;
}

void save_field_spec(const FieldSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write layout file: " + path);
    out << "width = " << spec.width << "\n"
        << "height = " << spec.height << "\n"
        << "obstacle_count = " << spec.obstacle_count << "\n"
        << "layout = " << to_string(spec.layout) << "\n"
        << "rng_seed = " << spec.rng_seed << "\n";
}

}  // namespace wpnav
