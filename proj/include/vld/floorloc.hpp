#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "vld/perception.hpp"
#include "vld/render.hpp"
#include "vld/world.hpp"

namespace vld {

struct FloorlessViewError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FloorLocAbortError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Vertical extent of facade covered per view: 2 * standoff * tan(vfov/2).
// Waypoints are spaced by exactly this amount so consecutive frustum bands
// tile the facade without overlap.
double next_waypoint_spacing(double vfov_deg, double standoff);

// Fine-adjustment interpolation. Returns the descent height when
// F_cur >= F_tar, nullopt as the ascend-to-next-waypoint signal otherwise.
// Throws FloorlessViewError on F_new_i == 0 (caller ascends).
std::optional<double> eq3_next_height(double h_prev, double h_i, int f_new_i,
                                      int f_cur, int f_tar);

struct WaypointRecord {
    double height = 0.0;
    int f_new = 0;
    int f_cur_after = 0;
    bool refused = false;
};

struct FloorLocResult {
    double h_final = 0.0;
    PixelBox bbox_buil;
    int queries_used = 0;
    bool overshoot = false;       // ran past the roof without reaching F_tar
    int building_index = -1;      // building the ascent locked onto
    double standoff = 0.0;        // perpendicular distance held during ascent
    std::vector<WaypointRecord> waypoints;
};

struct FloorLocConfig {
    int front_cam = 1;
    int max_refusals = 3;
    CameraRig rig;
};

using FloorCountFn = std::function<FloorCountAnswer(const DronePose&, int cam)>;

// Waypoint ascent with band-anchored fine adjustment. The drone holds its
// horizontal position, faces the facade straight on, climbs band by band and
// applies eq3_next_height once the accumulated count reaches F_tar; the
// visible facade top (from the depth column under the camera axis) clamps
// the interpolation anchor so partially filled bands do not skew the
// estimated floor pitch. Mutates pose. Throws FloorLocAbortError after
// max_refusals consecutive refusals.
FloorLocResult localize_floor(const WorldModel& world, DronePose& pose, int f_tar,
                              const FloorCountFn& count_backend,
                              const FloorLocConfig& config = {});

// h = height_est * (F_tar - 0.5) / f_total_est, clamped below the roof line.
double direct_count_formula(double height_est, int f_tar, int f_total_est);

// Single-query baseline: retreat until the whole building fits the frustum,
// ask once for the total floor count, scale the pixel-box height estimate.
FloorLocResult direct_count_height(const WorldModel& world, DronePose& pose, int f_tar,
                                   const FloorCountFn& count_backend,
                                   const FloorLocConfig& config = {});

bool fl_failed(double h_final, double h_tar_true, double threshold = 7.0);

// Ground-truth target height: mid-height of floor f_tar.
double target_height(const Building& building, int f_tar);

} // namespace vld
