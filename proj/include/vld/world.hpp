#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vld/geometry.hpp"

namespace vld {

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ObjectCategory {
    tool, container, household, food, furniture, poster, toy, ornament
};
enum class ObjectColor {
    red, green, blue, yellow, white, black, orange, purple
};

const char* to_string(ObjectCategory c);
const char* to_string(ObjectColor c);
ObjectCategory category_from_string(const std::string& s);
ObjectColor color_from_string(const std::string& s);

struct ObjectTag {
    ObjectCategory category = ObjectCategory::household;
    ObjectColor color = ObjectColor::white;
    std::string label; // non-empty; (category, color, label) unique per building

    bool operator==(const ObjectTag& o) const {
        return category == o.category && color == o.color && label == o.label;
    }
    std::string describe() const; // "green flower pot"
};

struct Window {
    std::string id;
    int facade_index = 0; // edge index into the footprint
    int floor = 1;        // 1-based
    Vec3 center;          // on the facade plane
    double width = 1.2;
    double height = 1.4;
    std::vector<ObjectTag> decorations;
};

struct Building {
    std::vector<Vec2> footprint; // CCW convex polygon
    double floor_height = 3.0;
    int num_floors = 1;
    std::vector<Window> windows;

    double height() const { return floor_height * num_floors; }
    Vec2 facade_normal(int facade) const {
        return edge_outward_normal(footprint, static_cast<std::size_t>(facade));
    }
};

struct WorldBounds {
    double min_x = -150, min_y = -150, max_x = 150, max_y = 150;
};

struct WorldModel {
    std::vector<Building> buildings;
    WorldBounds bounds;
    std::uint64_t seed = 0;

    const Window* find_window(const std::string& id, int* building_index = nullptr) const;
};

struct DronePose {
    Vec3 position;      // altitude >= 0
    double yaw = 0.0;   // radians, wrapped to (-pi, pi]; 0 = +x, CCW positive
};

// Semi-panoramic rig: five depth cameras at fixed yaw offsets to the right
// of heading. Offsets are in degrees, positive = clockwise from heading, so
// +90 is the right-facing camera. Camera indices are 1-based in rig order.
struct CameraRig {
    static constexpr int kNumCameras = 5;
    double yaw_offsets_deg[kNumCameras] = {0.0, 45.0, 90.0, -45.0, -90.0};
    double hfov_deg = 90.0;
    double vfov_deg = 90.0;
    int width = 128;
    int height = 128;
    double max_range = 200.0;

    // world-frame yaw of camera cam's optical axis (cam is 1-based)
    double camera_yaw(const DronePose& pose, int cam) const;
};

struct DepthImage {
    int width = 0;
    int height = 0;
    double max_range = 0.0;        // no-hit sentinel, stored exactly
    std::vector<double> data;      // row-major ranges in meters

    double at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col]; }
    double& at(int row, int col) { return data[static_cast<std::size_t>(row) * width + col]; }
};

struct PixelBox {
    int x_min = 0, x_max = 0, y_min = 0, y_max = 0;

    int width() const { return x_max - x_min + 1; }
    int height() const { return y_max - y_min + 1; }
    bool operator==(const PixelBox& o) const {
        return x_min == o.x_min && x_max == o.x_max && y_min == o.y_min && y_max == o.y_max;
    }
};

// Ground-truth stand-in for RGB content: what an ideal detector could see of
// one window in one view.
struct VisibleFeature {
    std::string window_id;
    PixelBox pixel_box;
    int floor = 1;
    std::vector<ObjectTag> decorations;
    double occluded_fraction = 0.0; // [0, 1]; 1 = fully blocked
    int building_index = 0;
    double range = 0.0; // meters to window center
};

struct WorldGenParams {
    int num_buildings = 3;
    int min_floors = 2;
    int max_floors = 10;
    double min_floor_height = 2.5;
    double max_floor_height = 4.0;
    double min_radius = 9.0;   // footprint ellipse radii
    double max_radius = 18.0;
    double building_clearance = 28.0; // min gap between footprints
    double decoration_density = 0.4;  // P(window gets a decoration)
    double bounds_half_extent = 150.0;
    int max_attempts = 400;
};

// Deterministic procedural world. Throws GenerationError when the parameters
// cannot be satisfied inside the bounds.
WorldModel generate_world(std::uint64_t seed, const WorldGenParams& params = {});

// Largest facade-plane residual over all windows; generation keeps this at
// numerical zero, audits recompute it.
double max_facade_residual(const WorldModel& world);

} // namespace vld
