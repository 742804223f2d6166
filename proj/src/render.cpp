#include "vld/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vld {

namespace {

struct CamFrame {
    Vec3 origin;
    double cos_yaw, sin_yaw;
    double tan_h, tan_v;
};

CamFrame make_frame(const DronePose& pose, int cam, const CameraRig& rig) {
    CamFrame f;
    f.origin = pose.position;
    double yaw = rig.camera_yaw(pose, cam);
    f.cos_yaw = std::cos(yaw);
    f.sin_yaw = std::sin(yaw);
    f.tan_h = std::tan(0.5 * rig.hfov_deg * M_PI / 180.0);
    f.tan_v = std::tan(0.5 * rig.vfov_deg * M_PI / 180.0);
    return f;
}

Vec3 pixel_dir(const CamFrame& f, const CameraRig& rig, int u, int v) {
    double ry = (1.0 - 2.0 * u / rig.width) * f.tan_h;
    double rz = (1.0 - 2.0 * v / rig.height) * f.tan_v;
    return {f.cos_yaw - f.sin_yaw * ry, f.sin_yaw + f.cos_yaw * ry, rz};
}

void check_pose_outside(const WorldModel& world, const Vec3& p) {
    for (const Building& b : world.buildings) {
        if (p.z <= b.height() && point_in_convex_polygon(p.xy(), b.footprint))
            throw PoseInsideGeometryError("camera origin inside building");
    }
}

// Smallest parametric t >= 0 at which the ray o + t*dir enters the building
// (walls or roof); infinity when it misses.
double building_hit_t(const Building& b, const Vec3& o, const Vec3& dir) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = b.footprint.size();
    const double h = b.height();
    Vec2 o2{o.x, o.y};
    Vec2 d2{dir.x, dir.y};
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = b.footprint[i];
        const Vec2& c = b.footprint[(i + 1) % n];
        Vec2 e = c - a;
        double denom = d2.cross(e);
        if (denom == 0.0) continue;
        Vec2 ao = a - o2;
        double t = ao.cross(e) / denom;
        double s = ao.cross(d2) / denom;
        if (t >= 0.0 && s >= 0.0 && s <= 1.0) {
            double z = o.z + t * dir.z;
            if (z >= 0.0 && z <= h && t < best) best = t;
        }
    }
    if (dir.z != 0.0) {
        double t = (h - o.z) / dir.z;
        if (t >= 0.0 && t < best) {
            Vec2 p = o2 + d2 * t;
            if (point_in_convex_polygon(p, b.footprint)) best = t;
        }
    }
    return best;
}

} // namespace

DepthImage render_depth(const WorldModel& world, const DronePose& pose, int cam,
                        const CameraRig& rig) {
    check_pose_outside(world, pose.position);
    CamFrame frame = make_frame(pose, cam, rig);

    DepthImage img;
    img.width = rig.width;
    img.height = rig.height;
    img.max_range = rig.max_range;
    img.data.assign(static_cast<std::size_t>(rig.width) * rig.height, rig.max_range);

#pragma omp parallel for schedule(static)
    for (int v = 0; v < rig.height; ++v) {
        for (int u = 0; u < rig.width; ++u) {
            Vec3 dir = pixel_dir(frame, rig, u, v);
            double best_t = std::numeric_limits<double>::infinity();
            for (const Building& b : world.buildings) {
                double t = building_hit_t(b, frame.origin, dir);
                if (t < best_t) best_t = t;
            }
            if (std::isfinite(best_t)) {
                double range = best_t * std::sqrt(dir.x * dir.x + dir.y * dir.y +
                                                  dir.z * dir.z);
                img.at(v, u) = range > rig.max_range ? rig.max_range : range;
            }
        }
    }
    return img;
}

DepthImage render_depth_reference(const WorldModel& world, const DronePose& pose,
                                  int cam, const CameraRig& rig) {
    check_pose_outside(world, pose.position);
    CamFrame frame = make_frame(pose, cam, rig);

    DepthImage img;
    img.width = rig.width;
    img.height = rig.height;
    img.max_range = rig.max_range;
    img.data.assign(static_cast<std::size_t>(rig.width) * rig.height, rig.max_range);

    // One pixel at a time, every wall and roof of every building, collect all
    // candidate hits, then reduce.
    for (int v = 0; v < rig.height; ++v) {
        for (int u = 0; u < rig.width; ++u) {
            Vec3 dir = pixel_dir(frame, rig, u, v);
            Vec2 o2{frame.origin.x, frame.origin.y};
            Vec2 d2{dir.x, dir.y};
            std::vector<double> hits;
            for (const Building& b : world.buildings) {
                const std::size_t n = b.footprint.size();
                const double h = b.height();
                for (std::size_t i = 0; i < n; ++i) {
                    const Vec2& a = b.footprint[i];
                    const Vec2& c = b.footprint[(i + 1) % n];
                    Vec2 e = c - a;
                    double denom = d2.cross(e);
                    if (denom == 0.0) continue;
                    Vec2 ao = a - o2;
                    double t = ao.cross(e) / denom;
                    double s = ao.cross(d2) / denom;
                    if (t >= 0.0 && s >= 0.0 && s <= 1.0) {
                        double z = frame.origin.z + t * dir.z;
                        if (z >= 0.0 && z <= h) hits.push_back(t);
                    }
                }
                if (dir.z != 0.0) {
                    double t = (h - frame.origin.z) / dir.z;
                    if (t >= 0.0) {
                        // crossing-number point-in-polygon, unlike the sign
                        // test used by the fast path
                        Vec2 p = o2 + d2 * t;
                        bool inside = false;
                        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
                            const Vec2& pi = b.footprint[i];
                            const Vec2& pj = b.footprint[j];
                            if ((pi.y > p.y) != (pj.y > p.y) &&
                                p.x < (pj.x - pi.x) * (p.y - pi.y) / (pj.y - pi.y) + pi.x)
                                inside = !inside;
                        }
                        if (inside) hits.push_back(t);
                    }
                }
            }
            if (!hits.empty()) {
                double best_t = *std::min_element(hits.begin(), hits.end());
                double range = best_t * std::sqrt(dir.x * dir.x + dir.y * dir.y +
                                                  dir.z * dir.z);
                img.at(v, u) = range > rig.max_range ? rig.max_range : range;
            }
        }
    }
    return img;
}

double cast_ray_range(const WorldModel& world, const Vec3& origin, const Vec3& dir,
                      double max_range) {
    double best_t = std::numeric_limits<double>::infinity();
    for (const Building& b : world.buildings) {
        double t = building_hit_t(b, origin, dir);
        if (t < best_t) best_t = t;
    }
    if (!std::isfinite(best_t)) return max_range;
    double range = best_t * dir.norm();
    return range > max_range ? max_range : range;
}

bool project_point(const DronePose& pose, int cam, const CameraRig& rig,
                   const Vec3& point, double& u, double& v) {
    CamFrame f = make_frame(pose, cam, rig);
    Vec3 rel = point - f.origin;
    double x = f.cos_yaw * rel.x + f.sin_yaw * rel.y;   // forward
    double y = -f.sin_yaw * rel.x + f.cos_yaw * rel.y;  // left
    double z = rel.z;
    if (x <= 1e-9) return false;
    u = 0.5 * rig.width * (1.0 - (y / x) / f.tan_h);
    v = 0.5 * rig.height * (1.0 - (z / x) / f.tan_v);
    return true;
}

double column_bearing(const DronePose& pose, int cam, const CameraRig& rig, int u) {
    double tan_h = std::tan(0.5 * rig.hfov_deg * M_PI / 180.0);
    double ry = (1.0 - 2.0 * u / rig.width) * tan_h;
    return wrap_angle(rig.camera_yaw(pose, cam) + std::atan(ry));
}

namespace {

// fraction of {center, 4 corners} whose line of sight is blocked
double occlusion_fraction(const WorldModel& world, const Vec3& origin,
                          const Building& b, const Window& w, double max_range) {
    Vec2 facade_dir{-b.facade_normal(w.facade_index).y,
                    b.facade_normal(w.facade_index).x};
    Vec3 along{facade_dir.x * 0.5 * w.width, facade_dir.y * 0.5 * w.width, 0.0};
    Vec3 up{0.0, 0.0, 0.5 * w.height};
    const Vec3 samples[5] = {
        w.center,
        w.center - along - up, w.center + along - up,
        w.center - along + up, w.center + along + up,
    };
    int blocked = 0;
    for (const Vec3& p : samples) {
        Vec3 dir = p - origin;
        double dist = dir.norm();
        double hit = cast_ray_range(world, origin, dir, max_range);
        if (hit < dist - 1e-6) ++blocked;
    }
    return blocked / 5.0;
}

} // namespace

std::vector<VisibleFeature> visible_features(const WorldModel& world,
                                             const DronePose& pose, int cam,
                                             const CameraRig& rig) {
    check_pose_outside(world, pose.position);
    std::vector<VisibleFeature> out;
    for (std::size_t bi = 0; bi < world.buildings.size(); ++bi) {
        const Building& b = world.buildings[bi];
        for (const Window& w : b.windows) {
            double uc, vc;
            if (!project_point(pose, cam, rig, w.center, uc, vc)) continue;
            if (uc < 0.0 || uc >= rig.width || vc < 0.0 || vc >= rig.height) continue;
            double occ = occlusion_fraction(world, pose.position, b, w, rig.max_range);
            if (occ >= 1.0) continue;

            Vec2 normal = b.facade_normal(w.facade_index);
            Vec2 facade_dir{-normal.y, normal.x};
            Vec3 along{facade_dir.x * 0.5 * w.width, facade_dir.y * 0.5 * w.width, 0.0};
            Vec3 up{0.0, 0.0, 0.5 * w.height};
            double u_min = 1e18, u_max = -1e18, v_min = 1e18, v_max = -1e18;
            bool all_front = true;
            for (int sy = -1; sy <= 1; sy += 2) {
                for (int sz = -1; sz <= 1; sz += 2) {
                    Vec3 corner = w.center + along * sy + up * sz;
                    double u, v;
                    if (!project_point(pose, cam, rig, corner, u, v)) {
                        all_front = false;
                        break;
                    }
                    u_min = std::min(u_min, u);
                    u_max = std::max(u_max, u);
                    v_min = std::min(v_min, v);
                    v_max = std::max(v_max, v);
                }
                if (!all_front) break;
            }
            if (!all_front) continue;

            VisibleFeature feat;
            feat.window_id = w.id;
            feat.pixel_box.x_min = std::max(0, static_cast<int>(std::floor(u_min)));
            feat.pixel_box.x_max = std::min(rig.width - 1,
                                            static_cast<int>(std::ceil(u_max)) - 1);
            feat.pixel_box.y_min = std::max(0, static_cast<int>(std::floor(v_min)));
            feat.pixel_box.y_max = std::min(rig.height - 1,
                                            static_cast<int>(std::ceil(v_max)) - 1);
            if (feat.pixel_box.x_min > feat.pixel_box.x_max ||
                feat.pixel_box.y_min > feat.pixel_box.y_max)
                continue;
            feat.floor = w.floor;
            feat.decorations = w.decorations;
            feat.occluded_fraction = occ;
            feat.building_index = static_cast<int>(bi);
            feat.range = (w.center - pose.position).norm();
            out.push_back(std::move(feat));
        }
    }
    std::sort(out.begin(), out.end(),
              [](const VisibleFeature& a, const VisibleFeature& b) {
                  return a.window_id < b.window_id;
              });
    return out;
}

PixelBox building_pixel_box(const WorldModel& world, const DronePose& pose, int cam,
                            int building_index, const CameraRig& rig) {
    const Building& b = world.buildings.at(static_cast<std::size_t>(building_index));
    CamFrame f = make_frame(pose, cam, rig);

    // camera-frame coordinates of all prism vertices
    auto to_cam = [&](const Vec3& p) {
        Vec3 rel = p - f.origin;
        return Vec3{f.cos_yaw * rel.x + f.sin_yaw * rel.y,
                    -f.sin_yaw * rel.x + f.cos_yaw * rel.y, rel.z};
    };

    const double near_x = 1e-6;
    const std::size_t n = b.footprint.size();
    std::vector<Vec3> verts;
    verts.reserve(2 * n);
    for (const Vec2& v2 : b.footprint) {
        verts.push_back(to_cam({v2.x, v2.y, 0.0}));
        verts.push_back(to_cam({v2.x, v2.y, b.height()}));
    }

    // prism edges in camera frame, clipped to x >= near_x
    std::vector<std::pair<Vec3, Vec3>> edges;
    auto add_edge = [&](Vec3 p, Vec3 q) {
        if (p.x < near_x && q.x < near_x) return;
        if (p.x < near_x || q.x < near_x) {
            double t = (near_x - p.x) / (q.x - p.x);
            Vec3 cut = p + (q - p) * t;
            if (p.x < near_x) p = cut; else q = cut;
        }
        edges.emplace_back(p, q);
    };
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = (i + 1) % n;
        add_edge(verts[2 * i], verts[2 * i + 1]);         // vertical
        add_edge(verts[2 * i], verts[2 * j]);             // bottom ring
        add_edge(verts[2 * i + 1], verts[2 * j + 1]);     // top ring
    }
    if (edges.empty()) throw NotInViewError("building behind the camera");

    double u_min = 1e18, u_max = -1e18, v_min = 1e18, v_max = -1e18;
    for (const auto& [p, q] : edges) {
        for (const Vec3* e : {&p, &q}) {
            double u = 0.5 * rig.width * (1.0 - (e->y / e->x) / f.tan_h);
            double v = 0.5 * rig.height * (1.0 - (e->z / e->x) / f.tan_v);
            u_min = std::min(u_min, u);
            u_max = std::max(u_max, u);
            v_min = std::min(v_min, v);
            v_max = std::max(v_max, v);
        }
    }
    if (u_max < 0.0 || u_min >= rig.width || v_max < 0.0 || v_min >= rig.height)
        throw NotInViewError("building outside the frustum");

    PixelBox box;
    box.x_min = std::max(0, static_cast<int>(std::floor(u_min)));
    box.x_max = std::min(rig.width - 1, static_cast<int>(std::ceil(u_max)) - 1);
    box.y_min = std::max(0, static_cast<int>(std::floor(v_min)));
    box.y_max = std::min(rig.height - 1, static_cast<int>(std::ceil(v_max)) - 1);
    box.x_max = std::max(box.x_max, box.x_min);
    box.y_max = std::max(box.y_max, box.y_min);
    return box;
}

} // namespace vld
