#include "vld/sim.hpp"

#include <algorithm>
#include <cmath>

namespace vld {

const char* to_string(ActionKind k) {
    switch (k) {
        case ActionKind::translate: return "translate";
        case ActionKind::rotate_left_30: return "rotate_left_30";
        case ActionKind::approach: return "approach";
        case ActionKind::stop: return "stop";
    }
    return "stop";
}

ActionKind action_kind_from_string(const std::string& s) {
    if (s == "translate") return ActionKind::translate;
    if (s == "rotate_left_30") return ActionKind::rotate_left_30;
    if (s == "approach") return ActionKind::approach;
    if (s == "stop") return ActionKind::stop;
    throw std::invalid_argument("unknown action kind: " + s);
}

namespace {

// 3D clearance between a constant-altitude segment and a building prism
double segment_building_clearance(const Vec2& a, const Vec2& b, double altitude,
                                  const Building& building) {
    double horiz = segment_polygon_distance(a, b, building.footprint);
    double vert = altitude - building.height();
    if (vert <= 0.0) return horiz;                 // beside or into the walls
    return std::sqrt(horiz * horiz + vert * vert); // above the roof line
}

} // namespace

DronePose apply_action(const WorldModel& world, const DronePose& pose,
                       const Action& action, const SimConfig& cfg) {
    DronePose next = pose;
    switch (action.kind) {
        case ActionKind::stop:
            return next;
        case ActionKind::rotate_left_30:
            next.yaw = wrap_angle(pose.yaw + M_PI / 6.0);
            return next;
        case ActionKind::approach:
            next.yaw = wrap_angle(action.bearing);
            [[fallthrough]];
        case ActionKind::translate: {
            if (action.kind == ActionKind::translate) next.yaw = pose.yaw;
            Vec2 start = pose.position.xy();
            Vec2 end = start + Vec2{std::cos(action.bearing), std::sin(action.bearing)} *
                                   action.distance;
            for (const Building& b : world.buildings) {
                if (segment_building_clearance(start, end, pose.position.z, b) <
                    cfg.safety_radius)
                    throw CollisionError("translation passes within the safety radius "
                                         "of a building");
            }
            next.position.x = end.x;
            next.position.y = end.y;
            return next;
        }
    }
    return next;
}

double max_safe_translation(const WorldModel& world, const DronePose& pose,
                            double bearing, double limit, const SimConfig& cfg) {
    if (limit <= 0.0) return 0.0;
    Action probe{ActionKind::translate, bearing, limit};
    auto clear = [&](double d) {
        probe.distance = d;
        try {
            apply_action(world, pose, probe, cfg);
            return true;
        } catch (const CollisionError&) {
            return false;
        }
    };
    if (clear(limit)) return limit;
    double lo = 0.0, hi = limit;
    if (!clear(0.0)) return 0.0; // already inside the inflated zone
    for (int i = 0; i < 40; ++i) {
        double mid = 0.5 * (lo + hi);
        (clear(mid) ? lo : hi) = mid;
    }
    return lo;
}

Vec3 window_standoff_point(const WorldModel& world, const Window& window,
                           int building_index, double standoff_distance) {
    const Building& b = world.buildings.at(static_cast<std::size_t>(building_index));
    Vec2 normal = b.facade_normal(window.facade_index);
    return window.center + Vec3{normal.x, normal.y, 0.0} * standoff_distance;
}

bool check_success(const DronePose& pose, const WorldModel& world,
                   const std::string& target_window_id, double radius,
                   double standoff_distance) {
    int bi = 0;
    const Window* w = world.find_window(target_window_id, &bi);
    if (!w) return false;
    Vec3 target = window_standoff_point(world, *w, bi, standoff_distance);
    return (pose.position - target).norm() <= radius;
}

} // namespace vld
