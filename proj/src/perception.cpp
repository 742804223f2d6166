#include "vld/perception.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vld {

namespace {

// building + facade hit by the camera's central ray, or nullopt
struct FacadeHit {
    int building = -1;
    int facade = -1;
    double perp_distance = 0.0;
};

std::optional<FacadeHit> central_facade(const WorldModel& world, const DronePose& pose,
                                        int cam, const CameraRig& rig) {
    double yaw = rig.camera_yaw(pose, cam);
    Vec2 o = pose.position.xy();
    Vec2 d{std::cos(yaw), std::sin(yaw)};
    double best_t = std::numeric_limits<double>::infinity();
    FacadeHit hit;
    for (std::size_t bi = 0; bi < world.buildings.size(); ++bi) {
        const Building& b = world.buildings[bi];
        const std::size_t n = b.footprint.size();
        for (std::size_t e = 0; e < n; ++e) {
            double t, s;
            if (ray_segment_intersect(o, d, b.footprint[e], b.footprint[(e + 1) % n], t, s) &&
                t < best_t) {
                best_t = t;
                hit.building = static_cast<int>(bi);
                hit.facade = static_cast<int>(e);
            }
        }
    }
    if (hit.building < 0 || best_t > rig.max_range) return std::nullopt;
    const Building& b = world.buildings[hit.building];
    Vec2 a = b.footprint[hit.facade];
    Vec2 normal = b.facade_normal(hit.facade);
    hit.perp_distance = std::abs(normal.dot(o - a));
    return hit;
}

} // namespace

RequestInterpretation parse_request(const std::string& request_text, int true_floor,
                                    const ObjectTag& true_object, NoiseStream& noise) {
    (void)request_text; // the oracle answers from the task binding
    RequestInterpretation out;
    out.target_floor = true_floor;
    out.target_object = true_object;

    const NoiseProfile& p = noise.profile();
    bool perturb = noise.rng().bernoulli(p.parse_error_rate);
    if (!perturb) return out;

    // choose a perturbation: one of the floor offsets or a color swap
    std::map<int, double> modes = p.parse_floor_offsets;
    const int kColorSwap = std::numeric_limits<int>::min();
    modes[kColorSwap] = p.parse_color_swap_weight;
    int mode = noise.rng().weighted_int(modes);
    if (mode == kColorSwap) {
        int shift = noise.rng().uniform_int(1, 7);
        out.target_object.color = static_cast<ObjectColor>(
            (static_cast<int>(true_object.color) + shift) % 8);
    } else {
        out.target_floor = std::max(1, true_floor + mode);
    }
    out.perturbed = true;
    return out;
}

int count_floors_exact(const WorldModel& world, const DronePose& pose, int cam,
                       const CameraRig& rig) {
    auto hit = central_facade(world, pose, cam, rig);
    if (!hit) throw NoBuildingInViewError("no building along the camera axis");
    const Building& b = world.buildings[hit->building];
    double tan_v = std::tan(0.5 * rig.vfov_deg * M_PI / 180.0);
    double half_band = hit->perp_distance * tan_v;
    double lo = pose.position.z - half_band;
    double hi = pose.position.z + half_band;
    int count = 0;
    for (int f = 1; f <= b.num_floors; ++f) {
        double mid = (f - 0.5) * b.floor_height;
        if (mid >= lo && mid < hi) ++count;
    }
    return count;
}

FloorCountAnswer count_floors(const WorldModel& world, const DronePose& pose, int cam,
                              NoiseStream& noise, const CameraRig& rig) {
    int exact = count_floors_exact(world, pose, cam, rig); // throws when no building
    const NoiseProfile& p = noise.profile();

    FloorCountAnswer ans;
    if (noise.rng().bernoulli(p.refusal_rate)) {
        ans.refused = true;
        return ans;
    }
    int count = exact + noise.rng().weighted_int(p.floor_count_error_dist);
    if (p.floor_count_per_floor_rate > 0.0) {
        // small groups are counted reliably; each floor beyond the fourth in
        // view carries an independent +-1 miscount chance, so wide views
        // (whole buildings) degrade much more than narrow frustum bands
        for (int f = 4; f < exact; ++f) {
            if (noise.rng().bernoulli(p.floor_count_per_floor_rate))
                count += noise.rng().bernoulli(0.5) ? 1 : -1;
        }
    }
    ans.floors_visible = std::max(0, count);
    return ans;
}

RecognitionAnswer recognize_target(
    const std::array<std::vector<VisibleFeature>, CameraRig::kNumCameras>& features,
    const ObjectTag& target, NoiseStream& noise) {
    constexpr double kVisibilityThreshold = 0.5;

    // true detection: the decorated target window, scanning views in rig order
    const VisibleFeature* truth = nullptr;
    int truth_view = 0;
    for (int v = 0; v < CameraRig::kNumCameras && !truth; ++v) {
        for (const VisibleFeature& f : features[v]) {
            if (f.occluded_fraction >= kVisibilityThreshold) continue;
            for (const ObjectTag& tag : f.decorations) {
                if (tag == target) {
                    truth = &f;
                    truth_view = v + 1;
                    break;
                }
            }
            if (truth) break;
        }
    }

    // decoy: a visible non-target decoration sharing the target's color
    const VisibleFeature* decoy = nullptr;
    int decoy_view = 0;
    for (int v = 0; v < CameraRig::kNumCameras && !decoy; ++v) {
        for (const VisibleFeature& f : features[v]) {
            if (f.occluded_fraction >= kVisibilityThreshold) continue;
            if (truth && f.window_id == truth->window_id) continue;
            for (const ObjectTag& tag : f.decorations) {
                if (tag.color == target.color && !(tag == target)) {
                    decoy = &f;
                    decoy_view = v + 1;
                    break;
                }
            }
            if (decoy) break;
        }
    }

    const NoiseProfile& p = noise.profile();
    // draws consumed unconditionally to keep streams aligned across branches
    bool fn_hit = noise.rng().bernoulli(p.or_false_negative_rate);
    bool fp_hit = noise.rng().bernoulli(p.or_false_positive_rate);

    RecognitionAnswer ans;
    const VisibleFeature* claimed = nullptr;
    int claimed_view = 0;
    if (truth && !fn_hit) {
        claimed = truth;
        claimed_view = truth_view;
    }
    if (fp_hit && decoy) {
        claimed = decoy; // color-matched misidentification wins
        claimed_view = decoy_view;
    }
    if (claimed) {
        ans.found = true;
        ans.pixel_box = claimed->pixel_box;
        ans.view = claimed_view;
        ans.window_id = claimed->window_id;
    }
    return ans;
}

ExplorationMemory ExplorationMemory::for_building(const WorldModel& world,
                                                  int building_index) {
    ExplorationMemory mem;
    const Building& b = world.buildings.at(static_cast<std::size_t>(building_index));
    const std::size_t n = b.footprint.size();
    for (std::size_t e = 0; e < n; ++e) {
        Vec2 a = b.footprint[e];
        Vec2 c = b.footprint[(e + 1) % n];
        double len = (c - a).norm();
        int steps = std::max(1, static_cast<int>(len / mem.segment_length));
        Vec2 dir = (c - a) * (1.0 / steps);
        Vec2 normal = edge_outward_normal(b.footprint, e);
        for (int k = 0; k < steps; ++k) {
            mem.midpoints.push_back(a + dir * (k + 0.5));
            mem.normals.push_back(normal);
        }
    }
    mem.seen.assign(mem.midpoints.size(), 0);
    return mem;
}

std::vector<int> ExplorationMemory::visible_from(const WorldModel& world, const Vec2& p,
                                                 double max_range) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < midpoints.size(); ++i) {
        Vec2 to_p = p - midpoints[i];
        double dist = to_p.norm();
        if (dist > max_range) continue;
        if (normals[i].dot(to_p) <= 0.0) continue; // back side of the facade
        // pull the endpoint off the wall so the own-building test passes
        Vec2 probe = midpoints[i] + normals[i] * 0.05;
        bool blocked = false;
        for (const Building& other : world.buildings) {
            if (segment_intersects_polygon(p, probe, other.footprint)) {
                blocked = true;
                break;
            }
        }
        if (!blocked) out.push_back(static_cast<int>(i));
    }
    return out;
}

int ExplorationMemory::count_new(const std::vector<int>& visible) const {
    int n = 0;
    for (int i : visible)
        if (!seen[static_cast<std::size_t>(i)]) ++n;
    return n;
}

void ExplorationMemory::mark_seen(const std::vector<int>& visible) {
    for (int i : visible) seen[static_cast<std::size_t>(i)] = 1;
}

std::optional<ChoiceAnswer> choose_direction(const WorldModel& world,
                                             const ChoiceQuery& query,
                                             double deadlock_threshold,
                                             const SimConfig& sim) {
    static const int kPreference[5] = {3, 2, 1, 4, 5}; // middle, then leftward
    double best_score = -1.0;
    int best_k = 0;
    for (int k : kPreference) {
        double l = query.distances[k - 1];
        if (l < deadlock_threshold) continue;
        double safe = max_safe_translation(world, query.pose, query.bearings[k - 1], l, sim);
        if (safe < l - 1e-9) continue;
        double score = 0.0;
        if (query.memory) {
            Vec2 candidate = query.pose.position.xy() +
                             Vec2{std::cos(query.bearings[k - 1]),
                                  std::sin(query.bearings[k - 1])} * l;
            auto vis = query.memory->visible_from(world, candidate, 80.0);
            score = query.memory->count_new(vis);
        }
        if (score > best_score) {
            best_score = score;
            best_k = k;
        }
    }
    if (best_k == 0) return std::nullopt;
    return ChoiceAnswer{best_k};
}

Backends make_oracle_backends(const WorldModel& world, int true_floor,
                              const ObjectTag& true_object,
                              const OracleBackendOptions& options) {
    auto noise = std::make_shared<NoiseStream>(options.noise, options.episode_key);
    Backends b;
    b.parse_request = [noise, true_floor, true_object](const std::string& text) {
        return parse_request(text, true_floor, true_object, *noise);
    };
    b.count_floors = [&world, noise, rig = options.rig](const DronePose& pose, int cam) {
        return count_floors(world, pose, cam, *noise, rig);
    };
    b.recognize = [noise](const std::array<std::vector<VisibleFeature>,
                                           CameraRig::kNumCameras>& features,
                          const std::array<DepthImage, CameraRig::kNumCameras>&,
                          const ObjectTag& target) {
        return recognize_target(features, target, *noise);
    };
    if (options.center_only_choice) {
        b.choose = [](const ChoiceQuery&) -> std::optional<ChoiceAnswer> {
            return ChoiceAnswer{3};
        };
    } else {
        b.choose = [&world, threshold = options.deadlock_threshold,
                    sim = options.sim](const ChoiceQuery& q) {
            return choose_direction(world, q, threshold, sim);
        };
    }
    return b;
}

} // namespace vld
