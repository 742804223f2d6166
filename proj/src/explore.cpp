#include "vld/explore.hpp"

#include <algorithm>
#include <cmath>

namespace vld {

DepthImage crop_depth(const DepthImage& depth, const PixelBox& bbox) {
    if (bbox.y_min >= bbox.y_max) throw EmptyCropError("empty row range in bbox");
    int y0 = std::max(0, bbox.y_min);
    int y1 = std::min(depth.height - 1, bbox.y_max);
    DepthImage out;
    out.width = depth.width;
    out.height = y1 - y0 + 1;
    out.max_range = depth.max_range;
    out.data.assign(depth.data.begin() + static_cast<std::size_t>(y0) * depth.width,
                    depth.data.begin() + static_cast<std::size_t>(y1 + 1) * depth.width);
    return out;
}

SliceProfile slice_means(const DepthImage& depth, int x, int view) {
    SliceProfile p;
    p.view = view;
    p.x = x;
    p.means.resize(static_cast<std::size_t>(x));
    int base = depth.width / x;
    int extra = depth.width % x; // leftmost groups take one more column
    int col = 0;
    for (int g = 0; g < x; ++g) {
        int w = base + (g < extra ? 1 : 0);
        double sum = 0.0;
        for (int v = 0; v < depth.height; ++v)
            for (int u = col; u < col + w; ++u) sum += depth.at(v, u);
        p.means[static_cast<std::size_t>(g)] = sum / (static_cast<double>(w) * depth.height);
        col += w;
    }
    return p;
}

SplitResult find_split(const SliceProfile& profile, const SplitParams& params) {
    const int x = profile.x;
    const auto& m = profile.means;

    // prefix sums over values and squares
    std::vector<double> ps(x + 1, 0.0), ps2(x + 1, 0.0);
    for (int i = 0; i < x; ++i) {
        ps[i + 1] = ps[i] + m[i];
        ps2[i + 1] = ps2[i] + m[i] * m[i];
    }
    std::vector<int> over(x + 1, 0); // count of slices > d_max in a prefix
    for (int i = 0; i < x; ++i)
        over[i + 1] = over[i] + (m[i] > params.d_max ? 1 : 0);

    SplitResult best;
    for (int j = 1; j <= x - 1; ++j) {
        double mean_l = ps[j] / j;
        double mean_r = (ps[x] - ps[j]) / (x - j);
        if (mean_l - mean_r < params.delta) continue;
        int right_over = over[x] - over[j];
        int allowed = static_cast<int>(std::ceil(params.overflow_fraction * (x - j)));
        if (right_over > allowed) continue;
        double var_l = ps2[j] / j - mean_l * mean_l;
        double var_r = (ps2[x] - ps2[j]) / (x - j) - mean_r * mean_r;
        double objective = var_l + var_r;
        if (!best.j_star || objective < best.objective) {
            best.j_star = j;
            best.objective = objective;
        }
    }
    return best;
}

ViewpointChoice select_viewpoint(
    const std::array<SliceProfile, CameraRig::kNumCameras>& profiles,
    const SplitParams& base, int max_escalations) {
    SplitParams params = base;
    for (int esc = 0; esc <= max_escalations; ++esc) {
        ViewpointChoice choice;
        int best_j = 0;
        for (int v = 0; v < CameraRig::kNumCameras; ++v) { // rig order breaks ties
            SplitResult r = find_split(profiles[static_cast<std::size_t>(v)], params);
            if (r.j_star && *r.j_star > best_j) {
                best_j = *r.j_star;
                choice.view = v + 1;
                choice.split = r;
            }
        }
        if (best_j > 0) {
            choice.escalations = esc;
            choice.d_max_used = params.d_max;
            return choice;
        }
        params.d_max *= 2.0;
    }
    ViewpointChoice fallback;
    fallback.view = 3; // +90, the right-facing default
    fallback.escalations = max_escalations;
    fallback.d_max_used = base.d_max * std::pow(2.0, max_escalations);
    return fallback;
}

MarkedPoints mark_points(int width, int height) {
    MarkedPoints mp;
    for (int k = 1; k <= 5; ++k)
        mp.cols[static_cast<std::size_t>(k - 1)] =
            static_cast<int>(std::llround(width * (k / 6.0)));
    mp.row = height / 2;
    return mp;
}

double safe_distance(const DepthImage& depth, int col, int row, double l_max,
                     double safety_radius) {
    double d = depth.at(row, col);
    return std::min(std::max(0.0, d - safety_radius), l_max);
}

Action decide_action(const std::function<std::optional<ChoiceAnswer>(const ChoiceQuery&)>& choose,
                     const ChoiceQuery& query, double deadlock_threshold) {
    std::optional<ChoiceAnswer> answer;
    try {
        answer = choose(query);
    } catch (const std::exception&) {
        answer = std::nullopt; // backend failure behaves like a refusal
    }
    if (!answer) return Action{ActionKind::rotate_left_30, 0.0, 0.0};
    int k = answer->point_index;
    double l = query.distances[static_cast<std::size_t>(k - 1)];
    if (l < deadlock_threshold) return Action{ActionKind::rotate_left_30, 0.0, 0.0};
    return Action{ActionKind::translate, query.bearings[static_cast<std::size_t>(k - 1)], l};
}

std::vector<Action> approach_target(const RecognitionAnswer& answer,
                                    const DepthImage& depth, const DronePose& pose,
                                    const CameraRig& rig, const ApproachParams& params) {
    std::vector<Action> plan;
    if (!answer.found || !answer.pixel_box) {
        plan.push_back({ActionKind::stop, 0.0, 0.0});
        return plan;
    }
    const PixelBox& box = *answer.pixel_box;
    int cx = (box.x_min + box.x_max) / 2;
    int cy = (box.y_min + box.y_max) / 2;
    double range = depth.at(cy, cx);
    if (range < params.standoff) {
        plan.push_back({ActionKind::stop, 0.0, 0.0});
        return plan;
    }
    double bearing = column_bearing(pose, answer.view, rig, cx);
    double remaining = range - params.standoff;
    double current = range;
    while (remaining > 1e-9) {
        double step = std::min({remaining, std::max(0.0, current - params.safety_radius),
                                params.l_max});
        if (step <= 1e-9) break;
        plan.push_back({ActionKind::approach, bearing, step});
        remaining -= step;
        current -= step;
    }
    plan.push_back({ActionKind::stop, 0.0, 0.0});
    return plan;
}

} // namespace vld
