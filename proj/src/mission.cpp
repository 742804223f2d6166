#include "vld/mission.hpp"

#include <algorithm>
#include <cmath>

#include "vld/rng.hpp"

namespace vld {

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::success: return "success";
        case Outcome::budget_exhausted: return "budget_exhausted";
        case Outcome::collision: return "collision";
        case Outcome::floorloc_abort: return "floorloc_abort";
        case Outcome::misdelivery: return "misdelivery";
    }
    return "budget_exhausted";
}

Outcome outcome_from_string(const std::string& s) {
    if (s == "success") return Outcome::success;
    if (s == "budget_exhausted") return Outcome::budget_exhausted;
    if (s == "collision") return Outcome::collision;
    if (s == "floorloc_abort") return Outcome::floorloc_abort;
    if (s == "misdelivery") return Outcome::misdelivery;
    throw std::invalid_argument("unknown outcome: " + s);
}

const char* to_string(Phase p) {
    switch (p) {
        case Phase::Understand: return "Understand";
        case Phase::Ascend: return "Ascend";
        case Phase::Explore: return "Explore";
        case Phase::Approach: return "Approach";
        case Phase::Done: return "Done";
        case Phase::Failed: return "Failed";
    }
    return "Explore";
}

namespace {

struct Capture {
    std::array<std::vector<VisibleFeature>, CameraRig::kNumCameras> features;
    std::array<DepthImage, CameraRig::kNumCameras> depths;
};

Capture capture_all(const WorldModel& world, const DronePose& pose,
                    const CameraRig& rig) {
    Capture c;
    for (int cam = 1; cam <= CameraRig::kNumCameras; ++cam) {
        c.depths[static_cast<std::size_t>(cam - 1)] = render_depth(world, pose, cam, rig);
        c.features[static_cast<std::size_t>(cam - 1)] =
            visible_features(world, pose, cam, rig);
    }
    return c;
}

// rows of bbox_buil bound the crop; degenerate boxes fall back to full height
PixelBox crop_rows(const PixelBox& bbox, const CameraRig& rig) {
    PixelBox rows = bbox;
    rows.x_min = 0;
    rows.x_max = rig.width - 1;
    if (rows.y_min >= rows.y_max) {
        rows.y_min = 0;
        rows.y_max = rig.height - 1;
    }
    return rows;
}

} // namespace

EpisodeTrace run_episode(const TaskSpec& task, const WorldModel& world,
                         const Backends& backends, const MissionConfig& config) {
    const CameraRig& rig = config.rig;
    EpisodeTrace trace;
    trace.task_id = task.task_id;
    trace.target_window_id = task.target_window_id;
    trace.start_pose = task.start_pose;
    DronePose pose = task.start_pose;
    Rng episode_rng(Rng::mix(config.episode_seed, "episode:" + task.task_id));

    auto finalize = [&](Outcome outcome) {
        trace.outcome = outcome;
        trace.final_pose = pose;
        trace.steps_used = static_cast<int>(trace.steps.size());
        trace.complete = true;
        return trace;
    };

    // Understand
    RequestInterpretation interp = backends.parse_request(task.request_text);
    trace.interpretation_perturbed = interp.perturbed;
    trace.f_tar_used = interp.target_floor;

    // Ascend
    FloorLocConfig fl_cfg;
    fl_cfg.rig = rig;
    fl_cfg.max_refusals = config.max_refusals;
    FloorLocResult fl;
    try {
        if (config.floorloc == FloorLocMode::direct_count)
            fl = direct_count_height(world, pose, interp.target_floor,
                                     backends.count_floors, fl_cfg);
        else
            fl = localize_floor(world, pose, interp.target_floor,
                                backends.count_floors, fl_cfg);
    } catch (const FloorLocAbortError&) {
        trace.floorloc_aborted = true;
        return finalize(Outcome::floorloc_abort);
    } catch (const NoBuildingInViewError&) {
        trace.floorloc_aborted = true;
        return finalize(Outcome::floorloc_abort);
    }
    trace.ascend_yaw = pose.yaw;
    trace.h_final = fl.h_final;
    trace.floorloc_queries = fl.queries_used;
    trace.floorloc_overshoot = fl.overshoot;
    trace.bbox_buil = fl.bbox_buil;
    trace.floorloc_waypoints = fl.waypoints;

    const int target_building =
        fl.building_index >= 0 ? fl.building_index : task.building_index;
    ExplorationMemory memory = ExplorationMemory::for_building(world, target_building);
    memory.mark_seen(memory.visible_from(world, pose.position.xy(), 80.0));

    const PixelBox rows = crop_rows(trace.bbox_buil, rig);

    // Explore <-> Approach under the step budget
    while (static_cast<int>(trace.steps.size()) < config.step_budget) {
        StepRecord rec;
        rec.step = static_cast<int>(trace.steps.size()) + 1;
        rec.pose_before = pose;

        Capture cap = capture_all(world, pose, rig);
        RecognitionAnswer rec_ans =
            backends.recognize(cap.features, cap.depths, interp.target_object);
        rec.recognition_found = rec_ans.found;
        rec.claimed_window_id = rec_ans.window_id;

        Action act;
        if (rec_ans.found) {
            rec.phase = Phase::Approach;
            rec.selected_view = rec_ans.view;
            ApproachParams ap;
            ap.standoff = config.sim.standoff_distance;
            ap.l_max = config.explore.l_max;
            ap.safety_radius = config.sim.safety_radius;
            std::vector<Action> plan = approach_target(
                rec_ans, cap.depths[static_cast<std::size_t>(rec_ans.view - 1)], pose,
                rig, ap);
            act = plan.front();
            if (act.kind == ActionKind::stop) {
                rec.action = act;
                rec.pose_after = pose;
                trace.steps.push_back(rec);
                trace.delivery_attempted = true;
                bool ok = check_success(pose, world, task.target_window_id,
                                        config.sim.success_radius,
                                        config.sim.standoff_distance);
                return finalize(ok ? Outcome::success : Outcome::misdelivery);
            }
            // shorten rather than fly into a corner the ray missed
            double safe = max_safe_translation(world, pose, act.bearing, act.distance,
                                               config.sim);
            if (safe < act.distance - 1e-6) {
                if (safe >= 0.5) act.distance = safe;
                else act = Action{ActionKind::rotate_left_30, 0.0, 0.0};
            }
        } else {
            rec.phase = Phase::Explore;
            std::array<SliceProfile, CameraRig::kNumCameras> profiles;
            for (int cam = 1; cam <= CameraRig::kNumCameras; ++cam) {
                DepthImage cropped =
                    crop_depth(cap.depths[static_cast<std::size_t>(cam - 1)], rows);
                profiles[static_cast<std::size_t>(cam - 1)] =
                    slice_means(cropped, config.explore.slices, cam);
            }
            ViewpointChoice vp;
            switch (config.viewpoint) {
                case ViewpointMode::ours:
                    vp = select_viewpoint(profiles, config.explore.split,
                                          config.explore.max_escalations);
                    break;
                case ViewpointMode::random:
                    vp.view = episode_rng.uniform_int(1, CameraRig::kNumCameras);
                    vp.split = find_split(profiles[static_cast<std::size_t>(vp.view - 1)],
                                          config.explore.split);
                    break;
                case ViewpointMode::default_right:
                    vp.view = 3;
                    vp.split = find_split(profiles[2], config.explore.split);
                    break;
            }
            rec.selected_view = vp.view;
            rec.j_star = vp.split.j_star;
            rec.split_objective = vp.split.objective;
            rec.escalations = vp.escalations;

            MarkedPoints marks = mark_points(rig.width, rig.height);
            ChoiceQuery query;
            query.view = vp.view;
            query.mark_cols = marks.cols;
            query.mark_row = marks.row;
            for (int k = 0; k < 5; ++k) {
                query.distances[static_cast<std::size_t>(k)] = safe_distance(
                    cap.depths[static_cast<std::size_t>(vp.view - 1)],
                    marks.cols[static_cast<std::size_t>(k)], marks.row,
                    config.explore.l_max, config.explore.safety_radius);
                query.bearings[static_cast<std::size_t>(k)] = column_bearing(
                    pose, vp.view, rig, marks.cols[static_cast<std::size_t>(k)]);
            }
            query.pose = pose;
            query.target_building = target_building;
            query.memory = &memory;

            act = decide_action(backends.choose, query, config.explore.deadlock_threshold);
            if (act.kind == ActionKind::translate) {
                // recover which point produced it, for the record
                for (int k = 0; k < 5; ++k) {
                    if (std::abs(query.bearings[static_cast<std::size_t>(k)] - act.bearing) <
                        1e-12) {
                        rec.choice_point = k + 1;
                        break;
                    }
                }
            }
        }

        try {
            pose = apply_action(world, pose, act, config.sim);
        } catch (const CollisionError&) {
            rec.action = act;
            rec.pose_after = pose;
            trace.steps.push_back(rec);
            return finalize(Outcome::collision);
        }
        if (act.kind == ActionKind::translate || act.kind == ActionKind::approach)
            trace.path_length += act.distance;
        rec.action = act;
        rec.pose_after = pose;
        trace.steps.push_back(rec);
        memory.mark_seen(memory.visible_from(world, pose.position.xy(), 80.0));
    }
    return finalize(Outcome::budget_exhausted);
}

DronePose replay_trace(const EpisodeTrace& trace, const WorldModel& world,
                       const SimConfig& sim) {
    DronePose pose = trace.start_pose;
    if (!trace.floorloc_aborted) {
        pose.yaw = trace.ascend_yaw;
        pose.position.z = trace.h_final;
    }
    std::size_t n = trace.steps.size();
    // a collision trace records the refused action; it never executed
    if (trace.outcome == Outcome::collision && n > 0) --n;
    for (std::size_t i = 0; i < n; ++i)
        pose = apply_action(world, pose, trace.steps[i].action, sim);
    return pose;
}

Outcome classify_outcome(const EpisodeTrace& trace, const TaskSpec& task,
                         const WorldModel& world, const MissionConfig& config) {
    if (!trace.complete) throw MalformedTraceError("trace has no footer");
    if (trace.steps_used != static_cast<int>(trace.steps.size()))
        throw MalformedTraceError("steps_used disagrees with the step records");
    if (trace.floorloc_aborted) return Outcome::floorloc_abort;
    if (trace.outcome == Outcome::collision) {
        // a collision trace ends on the step whose action was refused
        if (trace.steps.empty()) throw MalformedTraceError("collision without steps");
        return Outcome::collision;
    }
    if (trace.delivery_attempted) {
        bool ok = check_success(trace.final_pose, world, task.target_window_id,
                                config.sim.success_radius, config.sim.standoff_distance);
        return ok ? Outcome::success : Outcome::misdelivery;
    }
    return Outcome::budget_exhausted;
}

} // namespace vld
