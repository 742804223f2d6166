#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vld/render.hpp"
#include "vld/rng.hpp"
#include "vld/sim.hpp"
#include "vld/world.hpp"

namespace vld {

struct NoBuildingInViewError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RequestInterpretation {
    int target_floor = 1;     // F_tar
    ObjectTag target_object;  // D_tar
    bool perturbed = false;   // noise left a mark; recorded in the trace
};

struct FloorCountAnswer {
    int floors_visible = 0; // F_new; meaningless when refused
    bool refused = false;
};

struct RecognitionAnswer {
    bool found = false;
    std::optional<PixelBox> pixel_box;
    int view = 0;           // camera index 1..5 when found
    std::string window_id;  // ground-truth id of the claimed window ("" if unknown)
};

struct ChoiceAnswer {
    int point_index = 3; // 1..5
};

// Boundary coverage of the target building, updated by the mission loop as
// the drone moves; the choice oracle scores candidates by how much unseen
// boundary they would reveal.
struct ExplorationMemory {
    double segment_length = 0.5;
    std::vector<Vec2> midpoints;   // boundary sample midpoints
    std::vector<Vec2> normals;     // outward normal per sample
    std::vector<char> seen;

    static ExplorationMemory for_building(const WorldModel& world, int building_index);
    // indices of samples visible from p (facing it, unobstructed, within range)
    std::vector<int> visible_from(const WorldModel& world, const Vec2& p,
                                  double max_range) const;
    int count_new(const std::vector<int>& visible) const;
    void mark_seen(const std::vector<int>& visible);
};

// Error knobs emulating model failure modes. floor_count_error_dist is an
// additive offset per query; floor_count_per_floor_rate additionally flips
// the count by +-1 per visible floor beyond the fourth, so the error
// magnitude scales with how many floors the view spans (whole-building
// counts degrade much more than narrow band counts, which is the failure
// mode that separates the two floor-localization methods).
struct NoiseProfile {
    double or_false_positive_rate = 0.0;
    double or_false_negative_rate = 0.0;
    std::map<int, double> floor_count_error_dist = {{0, 1.0}};
    double floor_count_per_floor_rate = 0.0;
    double refusal_rate = 0.0;
    double parse_error_rate = 0.0;
    std::map<int, double> parse_floor_offsets = {{-1, 1.0}, {1, 1.0}};
    double parse_color_swap_weight = 1.0;
    std::uint64_t seed = 0;
};

// Per-episode noise stream; deterministic in (profile seed, episode key,
// query order).
class NoiseStream {
public:
    NoiseStream(const NoiseProfile& profile, std::uint64_t episode_key)
        : profile_(profile), rng_(Rng::mix(profile.seed, "noise") ^ episode_key) {}

    const NoiseProfile& profile() const { return profile_; }
    Rng& rng() { return rng_; }

private:
    NoiseProfile profile_;
    Rng rng_;
};

// ---- oracle operations ----------------------------------------------------

RequestInterpretation parse_request(const std::string& request_text, int true_floor,
                                    const ObjectTag& true_object, NoiseStream& noise);

// Counts floors of the building straight ahead whose mid-height falls in the
// vertical frustum band on the facade plane. Throws NoBuildingInViewError.
FloorCountAnswer count_floors(const WorldModel& world, const DronePose& pose, int cam,
                              NoiseStream& noise, const CameraRig& rig = {});

// Noise-free geometric count, exposed for tests and for count_floors itself.
int count_floors_exact(const WorldModel& world, const DronePose& pose, int cam,
                       const CameraRig& rig = {});

RecognitionAnswer recognize_target(
    const std::array<std::vector<VisibleFeature>, CameraRig::kNumCameras>& features,
    const ObjectTag& target, NoiseStream& noise);

struct ChoiceQuery {
    int view = 3;                       // camera index of the marked image
    std::array<int, 5> mark_cols{};
    int mark_row = 0;
    std::array<double, 5> distances{};  // l_k, meters
    std::array<double, 5> bearings{};   // world bearing per marked column
    DronePose pose;
    int target_building = 0;
    const ExplorationMemory* memory = nullptr;
};

// Oracle policy: among candidates that are safe to execute, pick the one
// revealing the most unseen facade; ties prefer the middle point, then the
// points to its left. nullopt = no safe candidate (treated as a refusal).
std::optional<ChoiceAnswer> choose_direction(const WorldModel& world,
                                             const ChoiceQuery& query,
                                             double deadlock_threshold,
                                             const SimConfig& sim = {});

// ---- backend bundle --------------------------------------------------------

// Uniform facade over the four model roles so the mission loop does not care
// whether answers come from ground truth, noisy ground truth, or a remote
// endpoint.
struct Backends {
    std::function<RequestInterpretation(const std::string& request_text)> parse_request;
    std::function<FloorCountAnswer(const DronePose& pose, int cam)> count_floors;
    std::function<RecognitionAnswer(
        const std::array<std::vector<VisibleFeature>, CameraRig::kNumCameras>& features,
        const std::array<DepthImage, CameraRig::kNumCameras>& depths,
        const ObjectTag& target)> recognize;
    std::function<std::optional<ChoiceAnswer>(const ChoiceQuery&)> choose;
};

struct OracleBackendOptions {
    NoiseProfile noise;
    std::uint64_t episode_key = 0;
    bool center_only_choice = false; // ablation: always pick the middle point
    double deadlock_threshold = 1.0;
    SimConfig sim;
    CameraRig rig;
};

// Oracle backends bound to one episode: answers derive from world ground
// truth plus the task binding, perturbed by one shared noise stream.
Backends make_oracle_backends(const WorldModel& world, int true_floor,
                              const ObjectTag& true_object,
                              const OracleBackendOptions& options);

} // namespace vld
