#include "vld/floorloc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vld/sim.hpp"

namespace vld {

double next_waypoint_spacing(double vfov_deg, double standoff) {
    return 2.0 * standoff * std::tan(0.5 * vfov_deg * M_PI / 180.0);
}

std::optional<double> eq3_next_height(double h_prev, double h_i, int f_new_i,
                                      int f_cur, int f_tar) {
    if (f_cur < f_tar) return std::nullopt; // ascend to the next waypoint
    if (f_new_i == 0)
        throw FloorlessViewError("F_new is zero; interpolation undefined");
    return h_i - (h_i - h_prev) / f_new_i * (f_cur - f_tar);
}

namespace {

struct FacadeLock {
    int building = -1;
    int facade = -1;
    double standoff = 0.0;
    double facing_yaw = 0.0; // yaw that points straight at the facade
};

std::optional<FacadeLock> lock_facade(const WorldModel& world, const DronePose& pose,
                                      const CameraRig& rig, int cam) {
    double yaw = rig.camera_yaw(pose, cam);
    Vec2 o = pose.position.xy();
    Vec2 d{std::cos(yaw), std::sin(yaw)};
    double best_t = std::numeric_limits<double>::infinity();
    FacadeLock lock;
    for (std::size_t bi = 0; bi < world.buildings.size(); ++bi) {
        const Building& b = world.buildings[bi];
        const std::size_t n = b.footprint.size();
        for (std::size_t e = 0; e < n; ++e) {
            double t, s;
            if (ray_segment_intersect(o, d, b.footprint[e], b.footprint[(e + 1) % n], t, s) &&
                t < best_t) {
                best_t = t;
                lock.building = static_cast<int>(bi);
                lock.facade = static_cast<int>(e);
            }
        }
    }
    if (lock.building < 0 || best_t > rig.max_range) return std::nullopt;
    const Building& b = world.buildings[lock.building];
    Vec2 normal = b.facade_normal(lock.facade);
    lock.standoff = std::abs(normal.dot(o - b.footprint[lock.facade]));
    lock.facing_yaw = std::atan2(-normal.y, -normal.x);
    return lock;
}

// Highest facade point visible in the column under the camera axis, read
// from the depth image the way a depth assistant would: facade rows are the
// ones whose range matches standoff / cos(elevation).
double visible_facade_top(const WorldModel& world, const DronePose& pose,
                          const CameraRig& rig, int cam, double standoff) {
    DepthImage depth = render_depth(world, pose, cam, rig);
    int col = rig.width / 2;
    double tan_v = std::tan(0.5 * rig.vfov_deg * M_PI / 180.0);
    for (int v = 0; v < rig.height; ++v) { // rows scan top down
        double rz = (1.0 - 2.0 * v / rig.height) * tan_v;
        double expected = standoff * std::sqrt(1.0 + rz * rz);
        if (std::abs(depth.at(v, col) - expected) < 1.0)
            return pose.position.z + standoff * rz;
    }
    return -std::numeric_limits<double>::infinity();
}

PixelBox acquire_bbox(const WorldModel& world, const DronePose& pose,
                      const CameraRig& rig, int cam, int building) {
    try {
        return building_pixel_box(world, pose, cam, building, rig);
    } catch (const NotInViewError&) {
        return PixelBox{0, rig.width - 1, 0, rig.height - 1};
    }
}

} // namespace

FloorLocResult localize_floor(const WorldModel& world, DronePose& pose, int f_tar,
                              const FloorCountFn& count_backend,
                              const FloorLocConfig& config) {
    const CameraRig& rig = config.rig;
    auto lock = lock_facade(world, pose, rig, config.front_cam);
    if (!lock) throw NoBuildingInViewError("floor localization needs a facade ahead");
    pose.yaw = wrap_angle(lock->facing_yaw); // face the facade straight on

    FloorLocResult result;
    result.building_index = lock->building;
    result.standoff = lock->standoff;

    const double spacing = next_waypoint_spacing(rig.vfov_deg, lock->standoff);
    int f_cur = 0;
    int consecutive_refusals = 0;
    bool adjusted = false;
    double last_facade_top = 0.5;

    for (int i = 1; !adjusted; ++i) {
        double h_i = (i - 0.5) * spacing;
        double band_lo = h_i - 0.5 * spacing;
        double band_hi = h_i + 0.5 * spacing;
        pose.position.z = h_i;

        double facade_top = visible_facade_top(world, pose, rig, config.front_cam,
                                               lock->standoff);
        if (std::isfinite(facade_top)) last_facade_top = std::max(last_facade_top, facade_top);
        if (band_lo >= facade_top) {
            // climbed past the roof without reaching F_tar
            result.overshoot = true;
            result.h_final = std::max(0.5, last_facade_top);
            pose.position.z = result.h_final;
            break;
        }

        FloorCountAnswer ans = count_backend(pose, config.front_cam);
        ++result.queries_used;
        if (ans.refused) {
            if (++consecutive_refusals >= config.max_refusals)
                throw FloorLocAbortError("floor count refused too many times");
            --i; // retry the same waypoint
            continue;
        }
        consecutive_refusals = 0;

        WaypointRecord rec;
        rec.height = h_i;
        rec.f_new = ans.floors_visible;
        rec.f_cur_after = f_cur + ans.floors_visible;
        result.waypoints.push_back(rec);

        if (ans.floors_visible == 0) continue; // floorless view: keep ascending

        f_cur += ans.floors_visible;
        double band_top = std::min(band_hi, facade_top);
        std::optional<double> h_adj;
        try {
            h_adj = eq3_next_height(band_lo, band_top, ans.floors_visible, f_cur, f_tar);
        } catch (const FloorlessViewError&) {
            h_adj = std::nullopt;
        }
        if (!h_adj) continue; // F_cur < F_tar: next waypoint

        // land mid-floor: half an estimated floor below the interpolated top
        double floor_pitch = (band_top - band_lo) / ans.floors_visible;
        result.h_final = std::max(0.5, *h_adj - 0.5 * floor_pitch);
        pose.position.z = result.h_final;
        adjusted = true;
    }

    result.bbox_buil = acquire_bbox(world, pose, rig, config.front_cam, lock->building);
    return result;
}

double direct_count_formula(double height_est, int f_tar, int f_total_est) {
    double h = height_est * (f_tar - 0.5) / f_total_est;
    return std::clamp(h, 0.3, height_est - 0.3);
}

FloorLocResult direct_count_height(const WorldModel& world, DronePose& pose, int f_tar,
                                   const FloorCountFn& count_backend,
                                   const FloorLocConfig& config) {
    const CameraRig& rig = config.rig;
    auto lock = lock_facade(world, pose, rig, config.front_cam);
    if (!lock) throw NoBuildingInViewError("direct count needs a facade ahead");
    pose.yaw = wrap_angle(lock->facing_yaw);

    FloorLocResult result;
    result.building_index = lock->building;
    result.standoff = lock->standoff;

    // retreat along the facade normal until the building top enters the image
    const Building& b = world.buildings[lock->building];
    Vec2 normal = b.facade_normal(lock->facade);
    double back_bearing = std::atan2(normal.y, normal.x);
    DronePose view_pose = pose;
    SimConfig sim;
    for (int step = 0; step < 40; ++step) {
        try {
            PixelBox box = building_pixel_box(world, view_pose, config.front_cam,
                                              lock->building, rig);
            if (box.y_min > 0) break; // whole silhouette inside the frustum
        } catch (const NotInViewError&) {
        }
        double moved = max_safe_translation(world, view_pose, back_bearing, 5.0, sim);
        if (moved < 1e-6) break; // boxed in; estimate from here
        Vec2 next = view_pose.position.xy() +
                    Vec2{std::cos(back_bearing), std::sin(back_bearing)} * moved;
        view_pose.position.x = next.x;
        view_pose.position.y = next.y;
    }

    FloorCountAnswer ans = count_backend(view_pose, config.front_cam);
    result.queries_used = 1;
    if (ans.refused || ans.floors_visible <= 0)
        throw FloorLocAbortError("direct count got no usable answer");

    PixelBox box = acquire_bbox(world, view_pose, rig, config.front_cam, lock->building);
    DepthImage depth = render_depth(world, view_pose, config.front_cam, rig);
    double range_center = depth.at(rig.height / 2, rig.width / 2);
    double tan_v = std::tan(0.5 * rig.vfov_deg * M_PI / 180.0);
    double tan_top = (1.0 - 2.0 * box.y_min / static_cast<double>(rig.height)) * tan_v;
    double tan_bot = (1.0 - 2.0 * (box.y_max + 1) / static_cast<double>(rig.height)) * tan_v;
    double height_est = range_center * (tan_top - tan_bot);

    result.h_final = direct_count_formula(height_est, f_tar, ans.floors_visible);
    pose.position.z = result.h_final;
    result.bbox_buil = acquire_bbox(world, pose, rig, config.front_cam, lock->building);
    return result;
}

bool fl_failed(double h_final, double h_tar_true, double threshold) {
    return std::abs(h_final - h_tar_true) > threshold;
}

double target_height(const Building& building, int f_tar) {
    return (f_tar - 0.5) * building.floor_height;
}

} // namespace vld
