#pragma once

#include <array>
#include <optional>
#include <vector>

#include "vld/perception.hpp"
#include "vld/render.hpp"
#include "vld/sim.hpp"
#include "vld/world.hpp"

namespace vld {

struct EmptyCropError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-view slice profile: mean depth of x equal-width vertical slices of the
// cropped depth image.
struct SliceProfile {
    int view = 0; // camera index 1..5
    std::vector<double> means;
    int x = 20;
};

// 1-based split index; left partition is slices 1..j, right is j+1..x.
struct SplitResult {
    std::optional<int> j_star;
    double objective = 0.0; // Var(left) + Var(right) at j_star
};

struct SplitParams {
    double delta = 5.0;             // required mean(left) - mean(right)
    double d_max = 40.0;            // far cutoff for the right partition
    double overflow_fraction = 0.2; // allowed share of right slices beyond d_max
};

struct ExploreParams {
    SplitParams split;
    int slices = 20;          // x
    int max_escalations = 2;  // d_max doublings when no view has a split
    double l_max = 10.0;      // per-step translation cap
    double deadlock_threshold = 1.0;
    double safety_radius = 0.5;
};

// Keeps rows [y_min, y_max] of bbox, all columns. Throws EmptyCropError when
// y_min >= y_max.
DepthImage crop_depth(const DepthImage& depth, const PixelBox& bbox);

// Columns are split into x contiguous groups; when x does not divide the
// width the leftmost groups take the extra column.
SliceProfile slice_means(const DepthImage& depth, int x = 20, int view = 0);

SplitResult find_split(const SliceProfile& profile, const SplitParams& params);

struct ViewpointChoice {
    int view = 3;       // camera index 1..5; +90 right-facing is the fallback
    SplitResult split;
    int escalations = 0;
    double d_max_used = 0.0;
};

// Eq. of the exploration view: the view with the highest j*, ties broken by
// rig order; d_max doubles per escalation when no view has a valid split.
ViewpointChoice select_viewpoint(
    const std::array<SliceProfile, CameraRig::kNumCameras>& profiles,
    const SplitParams& base, int max_escalations = 2);

struct MarkedPoints {
    std::array<int, 5> cols{};
    int row = 0;
};

// Five evenly distributed points on the horizontal center line.
MarkedPoints mark_points(int width, int height);

// min(depth(p) - safety_radius, L_max), floored at zero.
double safe_distance(const DepthImage& depth, int col, int row, double l_max,
                     double safety_radius = 0.5);

// Turns a choice answer into an action; backend refusal or a sub-threshold
// distance falls back to the 30-degree left rotation.
Action decide_action(const std::function<std::optional<ChoiceAnswer>(const ChoiceQuery&)>& choose,
                     const ChoiceQuery& query, double deadlock_threshold);

struct ApproachParams {
    double standoff = 1.5;
    double l_max = 10.0;
    double safety_radius = 0.5;
};

// Plan from one observation: yaw onto the box center, close to the standoff
// distance in safe steps, then stop. The caller re-plans after every
// executed step.
std::vector<Action> approach_target(const RecognitionAnswer& answer,
                                    const DepthImage& depth, const DronePose& pose,
                                    const CameraRig& rig, const ApproachParams& params);

} // namespace vld
