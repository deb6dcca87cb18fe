#include "wpnav/waypoint_net.hpp"

#include <algorithm>
#include <numeric>

#include <omp.h>

#include "wpnav/path_reward.hpp"

namespace wpnav {

nn::Network<float> make_waypoint_model(std::uint64_t seed) {
    nn::Network<float> net;
    net.add<nn::Conv2d<float>>(kGoseloChannels, 32, 3, 2);
    net.add<nn::ReLU<float>>();
    net.add<nn::Conv2d<float>>(32, 64, 3, 2);
    net.add<nn::ReLU<float>>();
    net.add<nn::Conv2d<float>>(64, 64, 3, 2);
    net.add<nn::ReLU<float>>();
    net.add<nn::GlobalAvgPool<float>>();
    net.add<nn::FullyConnected<float>>(64, 256);
    net.add<nn::ReLU<float>>();
    net.add<nn::FullyConnected<float>>(256, 2 * kWaypointCount);
    Rng rng(Rng::mix(seed, 0xcafe));
    net.init_he_uniform(rng);
    return net;
}

namespace {

struct SampleResult {
    bool ok = false;
    int attempts = 0;
};

// one dataset sample; retries with fresh layouts until the planner succeeds
SampleResult generate_sample(const FieldSpec& spec, RobotType robot, std::uint64_t sample_seed,
                             const PlannerPipeline& pipeline, float* image_out, float* label_out) {
    SampleResult res;
    for (int attempt = 0; attempt < 64; ++attempt) {
        ++res.attempts;
        const std::uint64_t sub = Rng::mix(sample_seed, std::uint64_t(attempt));
        World world(spec, robot);
        try {
            world.reset(sub);
        } catch (const LayoutError&) {
            continue;
        }
        const OccupancyGrid plan_grid =
            world.rasterize(pipeline.plan_resolution, pipeline.plan_extra_inflation());
        const auto start = nearest_free_cell(plan_grid, world.robot().position);
        const auto goal = nearest_free_cell(plan_grid, world.goal());
        if (!start || !goal) continue;
        std::optional<GridPath> path;
        try {
            path = astar(plan_grid, *start, *goal);
        } catch (const std::invalid_argument&) {
            continue;
        }
        if (!path) continue;
        const SmoothPath smooth =
            shortcut_smooth(*path, plan_grid, pipeline.smooth_iterations, Rng::mix(sub, 0x57));
        const GoseloFrame frame =
            build_frame(world.robot().position, world.goal(), pipeline.image_resolution);
        const auto label = make_label(smooth, world.robot().position, frame);
        const OccupancyGrid img_grid = world.rasterize(pipeline.image_resolution);
        const GoseloImage img = encode(img_grid, frame);
        std::copy(img.data.begin(), img.data.end(), image_out);
        for (int i = 0; i < kWaypointCount; ++i) {
            label_out[2 * i] = float(label[i].x);
            label_out[2 * i + 1] = float(label[i].y);
        }
        res.ok = true;
        return res;
    }
    return res;
}

}  // namespace

SlDataset generate_dataset(const FieldSpec& spec, RobotType robot, int count, std::uint64_t seed,
                           const PlannerPipeline& pipeline) {
    if (count <= 0) throw std::invalid_argument("generate_dataset: count must be positive");
    SlDataset ds;
    ds.resize(count);
    std::vector<int> attempts(count, 0);
    std::vector<std::uint8_t> ok(count, 0);
#pragma omp parallel for schedule(dynamic, 16)
    for (int k = 0; k < count; ++k) {
        const SampleResult r = generate_sample(spec, robot, Rng::mix(seed, std::uint64_t(k)),
                                               pipeline, ds.image(k), ds.label(k));
        attempts[k] = r.attempts;
        ok[k] = r.ok ? 1 : 0;
    }
    long total_attempts = std::accumulate(attempts.begin(), attempts.end(), 0L);
    for (int k = 0; k < count; ++k)
        if (!ok[k])
            throw LayoutError("generate_dataset: sample " + std::to_string(k) +
                              " failed after 64 layout attempts");
    ds.unreachable_warning = total_attempts > 2L * count;
    return ds;
}

namespace {

double dataset_mse(nn::Network<float>& model, const SlDataset& ds,
                   const std::vector<std::int64_t>& idx, int batch) {
    if (idx.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t ofs = 0; ofs < idx.size(); ofs += batch) {
        const int b = int(std::min<std::size_t>(batch, idx.size() - ofs));
        nn::Tensor<float> x({b, kGoseloSize, kGoseloSize, kGoseloChannels});
        for (int i = 0; i < b; ++i)
            std::copy_n(ds.image(idx[ofs + i]), SlDataset::image_floats,
                        x.ptr() + std::int64_t(i) * SlDataset::image_floats);
        const auto y = model.forward(x);
        for (int i = 0; i < b; ++i) {
            const float* lab = ds.label(idx[ofs + i]);
            for (int j = 0; j < SlDataset::label_floats; ++j) {
                const double e = double(y.data[std::int64_t(i) * SlDataset::label_floats + j]) -
                                 double(lab[j]);
                total += e * e;
            }
        }
    }
    return total / double(idx.size());
}

}  // namespace

std::vector<SlEpochRow> train_waypoint_model(nn::Network<float>& model, const SlDataset& dataset,
                                             const SlTrainParams& params) {
    if (dataset.count <= 0) throw std::invalid_argument("train: dataset is empty");
    Rng rng(Rng::mix(params.seed, 0x51));

    std::vector<std::int64_t> order(dataset.count);
    std::iota(order.begin(), order.end(), 0);
    // seeded split: shuffle once, then carve off the validation tail
    for (std::int64_t i = dataset.count - 1; i > 0; --i)
        std::swap(order[i], order[rng.uniform_int(std::uint64_t(i + 1))]);
    const auto val_count = std::int64_t(double(dataset.count) * params.val_split);
    std::vector<std::int64_t> train_idx(order.begin(), order.end() - val_count);
    std::vector<std::int64_t> val_idx(order.end() - val_count, order.end());

    nn::Adam<float> opt(params.lr);
    std::vector<SlEpochRow> rows;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        for (std::int64_t i = std::int64_t(train_idx.size()) - 1; i > 0; --i)
            std::swap(train_idx[i], train_idx[rng.uniform_int(std::uint64_t(i + 1))]);

        double epoch_sq = 0.0;
        std::int64_t seen = 0;
        for (std::size_t ofs = 0; ofs < train_idx.size(); ofs += params.batch) {
            const int b = int(std::min<std::size_t>(params.batch, train_idx.size() - ofs));
            nn::Tensor<float> x({b, kGoseloSize, kGoseloSize, kGoseloChannels});
            for (int i = 0; i < b; ++i)
                std::copy_n(dataset.image(train_idx[ofs + i]), SlDataset::image_floats,
                            x.ptr() + std::int64_t(i) * SlDataset::image_floats);
            const auto y = model.forward(x);
            nn::Tensor<float> gy({b, int(SlDataset::label_floats)});
            for (int i = 0; i < b; ++i) {
                const float* lab = dataset.label(train_idx[ofs + i]);
                for (int j = 0; j < SlDataset::label_floats; ++j) {
                    const float e = y.data[std::int64_t(i) * SlDataset::label_floats + j] - lab[j];
                    epoch_sq += double(e) * double(e);
                    gy.data[std::int64_t(i) * SlDataset::label_floats + j] = 2.0f * e / float(b);
                }
            }
            model.zero_grad();
            model.backward(gy, true);
            opt.step(model.params(), model.grads());
            seen += b;
        }
        const double train_mse = seen > 0 ? epoch_sq / double(seen) : 0.0;
        const double val_mse = dataset_mse(model, dataset, val_idx, params.batch);
        if (!std::isfinite(train_mse) || !std::isfinite(val_mse))
            throw TrainingDivergedError("train_waypoint_model: non-finite loss at epoch " +
                                        std::to_string(epoch));
        rows.push_back({epoch, train_mse, val_mse});
    }
    return rows;
}

std::vector<SlEpochRow> finetune_waypoint_model(nn::Network<float>& model,
                                                const FieldSpec& new_spec, RobotType robot,
                                                int count, const SlTrainParams& params,
                                                const PlannerPipeline& pipeline) {
    if (params.epochs == 0) return {};
    const SlDataset ds = generate_dataset(new_spec, robot, count, params.seed, pipeline);
    return train_waypoint_model(model, ds, params);
}

GoseloImage encode_current(const World& world, const GoseloFrame& frame,
                           const PlannerPipeline& pipeline) {
    const OccupancyGrid grid = world.rasterize(pipeline.image_resolution);
    return encode(grid, frame);
}

WaypointPrediction predict_waypoints(nn::Network<float>& model, const GoseloImage& image,
                                     const GoseloFrame& frame, Vec2 agent_pos,
                                     double agent_heading) {
    nn::Tensor<float> x({1, kGoseloSize, kGoseloSize, kGoseloChannels});
    std::copy(image.data.begin(), image.data.end(), x.data.begin());
    const auto y = model.forward(x);
    WaypointPrediction pred;
    pred.world.reserve(kWaypointCount);
    pred.ego.reserve(kWaypointCount);
    const double ch = std::cos(agent_heading), sh = std::sin(agent_heading);
    for (int i = 0; i < kWaypointCount; ++i) {
        const Vec2 rel{double(y.data[2 * i]), double(y.data[2 * i + 1])};
        const Vec2 world = agent_pos + frame.rotate_from_frame(rel);
        pred.world.push_back(world);
        pred.ego.push_back(rotate(world - agent_pos, ch, -sh));
    }
    return pred;
}

std::optional<std::vector<Vec2>> CnnWaypointSource::waypoints(const World& world) {
    const GoseloFrame frame =
        build_frame(world.robot().position, world.goal(), pipeline_.image_resolution);
    const GoseloImage img = encode_current(world, frame, pipeline_);
    return predict_waypoints(model_, img, frame, world.robot().position, world.robot().heading)
        .world;
}

std::optional<std::vector<Vec2>> OracleWaypointSource::waypoints(const World& world) {
    const std::uint64_t call_seed = Rng::mix(seed_, calls_++);
    const OccupancyGrid grid =
        world.rasterize(pipeline_.plan_resolution, pipeline_.plan_extra_inflation());
    const auto start = nearest_free_cell(grid, world.robot().position);
    const auto goal = nearest_free_cell(grid, world.goal());
    if (!start || !goal) return std::nullopt;
    std::optional<GridPath> path;
    try {
        path = astar(grid, *start, *goal);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
    if (!path) return std::nullopt;
    const SmoothPath smooth = shortcut_smooth(*path, grid, pipeline_.smooth_iterations, call_seed);
    const GoseloFrame frame =
        build_frame(world.robot().position, world.goal(), pipeline_.image_resolution);
    const auto label = make_label(smooth, world.robot().position, frame);
    std::vector<Vec2> out;
    out.reserve(label.size());
    for (const Vec2& rel : label)
        out.push_back(world.robot().position + frame.rotate_from_frame(rel));
    return out;
}

GreedyFollowResult eval_greedy_follow(WaypointSource& source, const FieldSpec& spec,
                                      RobotType robot, int episodes, std::uint64_t seed,
                                      const ReplanPolicy& policy,
                                      const PlannerPipeline& pipeline) {
    (void)pipeline;
    GreedyFollowResult result;
    result.episodes = episodes;
    long total_collisions = 0;
    long total_steps = 0;
    int reached = 0;

    for (int ep = 0; ep < episodes; ++ep) {
        World world(spec, robot);
        world.reset(Rng::mix(seed, std::uint64_t(ep)));
        Vec2 pos = world.robot().position;
        const Vec2 goal = world.goal();
        const double goal_radius = world.params().goal_radius;
        const int cap = world.step_limit();

        std::vector<Vec2> wps;
        DividedPath divided;
        AgentTrace trace;
        int steps_since = 0;
        bool have_plan = false;

        auto replan = [&]() {
            // teleport evaluation keeps its own pose; sync the world copy
            auto w = source.waypoints(world);
            if (!w) return;
            wps = std::move(*w);
            divided = divide(wps);
            trace.reset(pos);
            steps_since = 0;
            have_plan = true;
        };

        for (int t = 0; t < cap; ++t) {
            if (t == 0) replan();
            if (!have_plan) break;
            const int near_wp = nni(pos, wps);
            const Vec2 target = wps[std::min(near_wp + 1, int(wps.size()) - 1)];

            // count continuous-space collisions along the jump
            const double len = dist(pos, target);
            const int samples = std::max(1, int(std::ceil(len / kCollisionSampleStep)));
            bool hit = false;
            for (int i = 1; i <= samples && !hit; ++i)
                hit = world.body_collides(pos + (target - pos) * (double(i) / samples));
            if (hit) ++total_collisions;

            pos = target;
            trace.append(pos);
            ++steps_since;
            ++total_steps;
            if (dist(pos, goal) < goal_radius) {
                ++reached;
                break;
            }
            world.teleport_robot(pos);  // keep the sim pose and visit history in sync
            const double dp = d_path(trace, divided);
            if (should_replan(dp, nni(pos, wps), int(wps.size()), policy, steps_since))
                replan();
        }
    }
    result.collisions_per_episode = episodes > 0 ? double(total_collisions) / episodes : 0.0;
    result.reach_rate = episodes > 0 ? double(reached) / episodes : 0.0;
    result.mean_steps = episodes > 0 ? double(total_steps) / episodes : 0.0;
    return result;
}

}  // namespace wpnav
