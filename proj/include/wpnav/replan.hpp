#pragma once

#include <optional>
#include <string>

namespace wpnav {

// Online replanning trigger: rule_based fires when the agent strayed more
// than d_update from the reference path or consumed more than half of the
// waypoint horizon; fixed_interval fires on a step schedule.
struct ReplanPolicy {
    enum class Mode { rule_based, fixed_interval };
    Mode mode = Mode::rule_based;
    double d_update = 0.3;   // meters
    int interval = 10;       // steps, fixed_interval only

    static ReplanPolicy rule_based(double d_update = 0.3) {
        return {Mode::rule_based, d_update, 0};
    }
    static ReplanPolicy fixed(int interval) {
        return {Mode::fixed_interval, 0.3, interval};
    }
    std::string name() const;
};

std::optional<ReplanPolicy> replan_policy_from_string(const std::string& s);

// nni is the index of the waypoint nearest to the agent (0-based over the
// waypoint list, not the divided path).
bool should_replan(double d_path, int nni, int waypoint_count, const ReplanPolicy& policy,
                   int steps_since_replan);

}  // namespace wpnav
