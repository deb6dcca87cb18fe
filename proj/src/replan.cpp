#include "wpnav/replan.hpp"

#include <stdexcept>

namespace wpnav {

std::string ReplanPolicy::name() const {
    if (mode == Mode::rule_based) return "rule_based";
    return "fixed_" + std::to_string(interval);
}

std::optional<ReplanPolicy> replan_policy_from_string(const std::string& s) {
    if (s == "rule_based") return ReplanPolicy::rule_based();
    if (s.rfind("fixed_", 0) == 0) {
        const int iv = std::stoi(s.substr(6));
        if (iv < 1) return std::nullopt;
        return ReplanPolicy::fixed(iv);
    }
    return std::nullopt;
}

bool should_replan(double d_path, int nni, int waypoint_count, const ReplanPolicy& policy,
                   int steps_since_replan) {
    if (policy.mode == ReplanPolicy::Mode::fixed_interval)
        return steps_since_replan >= policy.interval;
    if (policy.d_update <= 0.0)
        throw std::invalid_argument("should_replan: d_update must be positive");
    return d_path > policy.d_update || 2 * nni > waypoint_count;
}

}  // namespace wpnav
