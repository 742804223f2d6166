#pragma once

#include <stdexcept>
#include <string>

#include "vld/world.hpp"

namespace vld {

struct CollisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ActionKind { translate, rotate_left_30, approach, stop };

const char* to_string(ActionKind k);
ActionKind action_kind_from_string(const std::string& s);

// One drone action. translate moves along `bearing` (world frame, radians)
// at constant altitude; approach additionally snaps yaw to the bearing
// first; rotate_left_30 carries no translation.
struct Action {
    ActionKind kind = ActionKind::stop;
    double bearing = 0.0;
    double distance = 0.0;
};

struct SimConfig {
    double safety_radius = 0.5;      // collision inflation, meters
    double standoff_distance = 1.5;  // delivery point offset from window
    double success_radius = 3.0;     // neighborhood around the standoff point
};

// Kinematic pose update. Throws CollisionError when the swept segment comes
// within safety_radius of any building (in 3D, roofs included).
DronePose apply_action(const WorldModel& world, const DronePose& pose,
                       const Action& action, const SimConfig& cfg = {});

// Largest translation distance along `bearing` that apply_action would
// accept, capped at `limit`. Used by planners to pre-validate moves.
double max_safe_translation(const WorldModel& world, const DronePose& pose,
                            double bearing, double limit, const SimConfig& cfg = {});

// Delivery point: window center displaced outward along the facade normal.
Vec3 window_standoff_point(const WorldModel& world, const Window& window,
                           int building_index, double standoff_distance);

bool check_success(const DronePose& pose, const WorldModel& world,
                   const std::string& target_window_id, double radius,
                   double standoff_distance = 1.5);

} // namespace vld
