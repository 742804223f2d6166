#include "vld/world.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "vld/rng.hpp"

namespace vld {

const char* to_string(ObjectCategory c) {
    switch (c) {
        case ObjectCategory::tool: return "tool";
        case ObjectCategory::container: return "container";
        case ObjectCategory::household: return "household";
        case ObjectCategory::food: return "food";
        case ObjectCategory::furniture: return "furniture";
        case ObjectCategory::poster: return "poster";
        case ObjectCategory::toy: return "toy";
        case ObjectCategory::ornament: return "ornament";
    }
    return "household";
}

const char* to_string(ObjectColor c) {
    switch (c) {
        case ObjectColor::red: return "red";
        case ObjectColor::green: return "green";
        case ObjectColor::blue: return "blue";
        case ObjectColor::yellow: return "yellow";
        case ObjectColor::white: return "white";
        case ObjectColor::black: return "black";
        case ObjectColor::orange: return "orange";
        case ObjectColor::purple: return "purple";
    }
    return "white";
}

ObjectCategory category_from_string(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(ObjectCategory::ornament); ++i) {
        auto c = static_cast<ObjectCategory>(i);
        if (s == to_string(c)) return c;
    }
    throw std::invalid_argument("unknown object category: " + s);
}

ObjectColor color_from_string(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(ObjectColor::purple); ++i) {
        auto c = static_cast<ObjectColor>(i);
        if (s == to_string(c)) return c;
    }
    throw std::invalid_argument("unknown object color: " + s);
}

std::string ObjectTag::describe() const {
    return std::string(to_string(color)) + " " + label;
}

const Window* WorldModel::find_window(const std::string& id, int* building_index) const {
    for (std::size_t b = 0; b < buildings.size(); ++b) {
        for (const Window& w : buildings[b].windows) {
            if (w.id == id) {
                if (building_index) *building_index = static_cast<int>(b);
                return &w;
            }
        }
    }
    return nullptr;
}

double CameraRig::camera_yaw(const DronePose& pose, int cam) const {
    double offset = yaw_offsets_deg[cam - 1] * M_PI / 180.0;
    return wrap_angle(pose.yaw - offset);
}

namespace {

// Label pools per category; combined with 8 colors this gives plenty of
// unique (category, color, label) triples per building.
const std::array<std::vector<const char*>, 8> kLabels = {{
    {"hammer", "wrench", "drill", "saw"},                    // tool
    {"flower pot", "bucket", "vase", "basket"},              // container
    {"broom", "lamp", "clock", "mirror"},                    // household
    {"fruit bowl", "bread basket", "cake box", "jam jar"},   // food
    {"chair", "stool", "bench", "shelf"},                    // furniture
    {"movie poster", "band poster", "travel poster", "art print"}, // poster
    {"teddy bear", "toy car", "kite", "rocking horse"},      // toy
    {"wind chime", "garland", "figurine", "lantern"},        // ornament
}};

std::vector<Vec2> make_footprint(Rng& rng, int n_vertices, double min_radius,
                                 double max_radius) {
    // vertices on a rotated ellipse at increasing angles -> convex & CCW
    for (int attempt = 0; attempt < 64; ++attempt) {
        double rx = rng.uniform(min_radius, max_radius);
        double ry = rng.uniform(min_radius, max_radius);
        double rot = rng.uniform(0.0, M_PI);
        std::vector<double> angles(n_vertices);
        for (auto& a : angles) a = rng.uniform(0.0, 2.0 * M_PI);
        std::sort(angles.begin(), angles.end());
        // reject slivers: enforce a minimum angular gap
        bool ok = true;
        for (int i = 0; i < n_vertices; ++i) {
            double next = (i + 1 < n_vertices) ? angles[i + 1] : angles[0] + 2.0 * M_PI;
            if (next - angles[i] < 2.0 * M_PI / (2.5 * n_vertices)) { ok = false; break; }
        }
        if (!ok) continue;
        std::vector<Vec2> poly;
        poly.reserve(n_vertices);
        double cr = std::cos(rot), sr = std::sin(rot);
        for (double a : angles) {
            double ex = rx * std::cos(a), ey = ry * std::sin(a);
            poly.push_back({ex * cr - ey * sr, ex * sr + ey * cr});
        }
        // every facade must have room for at least one window
        double min_edge = 1e9;
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i)
            min_edge = std::min(min_edge, (poly[(i + 1) % n] - poly[i]).norm());
        if (min_edge < 6.0) continue;
        if (!polygon_is_convex(poly)) continue;
        return poly;
    }
    return {};
}

void add_windows(Rng& rng, Building& b, int building_index,
                 double decoration_density, std::set<std::string>& used_tags) {
    const std::size_t n = b.footprint.size();
    int wid = 0;
    for (std::size_t f = 0; f < n; ++f) {
        Vec2 a = b.footprint[f];
        Vec2 c = b.footprint[(f + 1) % n];
        Vec2 dir = (c - a).normalized();
        double len = (c - a).norm();
        int count = static_cast<int>((len - 2.0) / 3.0);
        if (count < 1) continue;
        double spacing = len / (count + 1);
        for (int floor = 1; floor <= b.num_floors; ++floor) {
            double z = (floor - 0.5) * b.floor_height;
            for (int k = 1; k <= count; ++k) {
                Vec2 p = a + dir * (spacing * k);
                Window w;
                w.id = "b" + std::to_string(building_index) + "_fa" + std::to_string(f) +
                       "_f" + std::to_string(floor) + "_w" + std::to_string(wid++);
                w.facade_index = static_cast<int>(f);
                w.floor = floor;
                w.center = {p.x, p.y, z};
                w.width = 1.2;
                w.height = 1.4;
                if (rng.bernoulli(decoration_density)) {
                    // unique triple within the building
                    for (int tries = 0; tries < 40; ++tries) {
                        ObjectTag tag;
                        tag.category = static_cast<ObjectCategory>(rng.uniform_int(0, 7));
                        tag.color = static_cast<ObjectColor>(rng.uniform_int(0, 7));
                        const auto& pool = kLabels[static_cast<int>(tag.category)];
                        tag.label = pool[rng.uniform_int(0, static_cast<int>(pool.size()) - 1)];
                        std::string key = std::string(to_string(tag.category)) + "|" +
                                          to_string(tag.color) + "|" + tag.label;
                        if (used_tags.insert(key).second) {
                            w.decorations.push_back(tag);
                            break;
                        }
                    }
                }
                b.windows.push_back(std::move(w));
            }
        }
    }
}

} // namespace

WorldModel generate_world(std::uint64_t seed, const WorldGenParams& params) {
    if (params.num_buildings < 1) throw GenerationError("num_buildings must be >= 1");
    if (params.min_floors < 1 || params.max_floors < params.min_floors)
        throw GenerationError("invalid floor range");
    if (params.min_floor_height <= 0 || params.max_floor_height < params.min_floor_height)
        throw GenerationError("invalid floor height range");

    Rng rng(Rng::mix(seed, "world-gen"));
    WorldModel world;
    world.seed = seed;
    world.bounds = {-params.bounds_half_extent, -params.bounds_half_extent,
                    params.bounds_half_extent, params.bounds_half_extent};

    // vertex-count pool: mostly quads, always one octagon when there is room
    // for hard tasks (>3 corner roundings needs an 8-gon)
    std::vector<int> vertex_counts;
    for (int i = 0; i < params.num_buildings; ++i) {
        if (i == 1) vertex_counts.push_back(8);
        else {
            const int pool[] = {4, 4, 4, 3, 5, 6, 8};
            vertex_counts.push_back(pool[rng.uniform_int(0, 6)]);
        }
    }

    int attempts = 0;
    std::set<std::string> used_tags; // (category, color, label) unique world-wide
    for (int i = 0; i < params.num_buildings; ++i) {
        bool placed = false;
        while (!placed) {
            if (++attempts > params.max_attempts)
                throw GenerationError("generation infeasible: cannot place buildings "
                                      "without overlap inside bounds");
            std::vector<Vec2> shape = make_footprint(rng, vertex_counts[i],
                                                     params.min_radius, params.max_radius);
            if (shape.empty()) continue;
            double margin = params.max_radius + params.building_clearance;
            Vec2 center{rng.uniform(world.bounds.min_x + margin, world.bounds.max_x - margin),
                        rng.uniform(world.bounds.min_y + margin, world.bounds.max_y - margin)};
            std::vector<Vec2> poly;
            poly.reserve(shape.size());
            for (const Vec2& v : shape) poly.push_back(center + v);

            bool clear = true;
            for (const Building& other : world.buildings) {
                for (const Vec2& v : poly) {
                    if (point_polygon_distance(v, other.footprint) < params.building_clearance) {
                        clear = false;
                        break;
                    }
                }
                if (!clear) break;
                for (const Vec2& v : other.footprint) {
                    if (point_polygon_distance(v, poly) < params.building_clearance) {
                        clear = false;
                        break;
                    }
                }
                if (!clear) break;
            }
            if (!clear) continue;

            Building b;
            b.footprint = std::move(poly);
            b.num_floors = rng.uniform_int(params.min_floors, params.max_floors);
            b.floor_height = rng.uniform(params.min_floor_height, params.max_floor_height);
            add_windows(rng, b, i, params.decoration_density, used_tags);
            world.buildings.push_back(std::move(b));
            placed = true;
        }
    }
    return world;
}

double max_facade_residual(const WorldModel& world) {
    double worst = 0.0;
    for (const Building& b : world.buildings) {
        const std::size_t n = b.footprint.size();
        for (const Window& w : b.windows) {
            const Vec2& a = b.footprint[w.facade_index];
            Vec2 normal = edge_outward_normal(b.footprint, static_cast<std::size_t>(w.facade_index));
            double residual = std::abs(normal.dot(w.center.xy() - a));
            worst = std::max(worst, residual);
            (void)n;
        }
    }
    return worst;
}

} // namespace vld
