#pragma once

#include <stdexcept>
#include <vector>

#include "vld/world.hpp"

namespace vld {

struct PoseInsideGeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotInViewError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Pinhole convention shared by everything that touches pixels:
//  - camera axes: +X forward, +Y left, +Z up
//  - the ray of pixel (col u, row v) passes through
//      y/x = (1 - 2u/W) * tan(hfov/2),  z/x = (1 - 2v/H) * tan(vfov/2)
//    so column W/2 / row H/2 lies exactly on the optical axis, and a kx-wide
//    image samples a subset of the rays of a (k*W)-wide one
//  - continuous image coordinates of a point run over [0, W) x [0, H);
//    the pixel box of a projected extent uses floor(min) / ceil(max)-1
// Depth samples are Euclidean range in meters along the ray.

// OpenMP-parallel ray cast against all extruded footprints (walls + roofs).
DepthImage render_depth(const WorldModel& world, const DronePose& pose, int cam,
                        const CameraRig& rig = {});

// Serial reference renderer: no culling, enumerates every candidate surface
// per pixel. Kept as the ground truth the fast path is tested against and as
// the baseline for the benchmark target.
DepthImage render_depth_reference(const WorldModel& world, const DronePose& pose,
                                  int cam, const CameraRig& rig = {});

// Range to the first surface along an arbitrary (not necessarily unit) ray;
// max_range when nothing is hit.
double cast_ray_range(const WorldModel& world, const Vec3& origin, const Vec3& dir,
                      double max_range);

// Every window whose center projects inside the frustum and that is not
// fully occluded, sorted by window_id.
std::vector<VisibleFeature> visible_features(const WorldModel& world,
                                             const DronePose& pose, int cam,
                                             const CameraRig& rig = {});

// Tight pixel box of the building silhouette, clamped to image bounds.
// Throws NotInViewError when no part of the building is in the frustum.
PixelBox building_pixel_box(const WorldModel& world, const DronePose& pose, int cam,
                            int building_index, const CameraRig& rig = {});

// Continuous image coordinates of a world point for one camera; returns
// false when the point is at or behind the image plane.
bool project_point(const DronePose& pose, int cam, const CameraRig& rig,
                   const Vec3& point, double& u, double& v);

// World bearing (radians) of the ray through column u (pixel index) of
// camera cam; the inverse of the horizontal part of the pinhole model.
double column_bearing(const DronePose& pose, int cam, const CameraRig& rig, int u);

} // namespace vld
