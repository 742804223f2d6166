#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vld/explore.hpp"
#include "vld/floorloc.hpp"
#include "vld/perception.hpp"
#include "vld/sim.hpp"
#include "vld/tasks.hpp"
#include "vld/world.hpp"

namespace vld {

struct MalformedTraceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Outcome { success, budget_exhausted, collision, floorloc_abort, misdelivery };
const char* to_string(Outcome o);
Outcome outcome_from_string(const std::string& s);

enum class Phase { Understand, Ascend, Explore, Approach, Done, Failed };
const char* to_string(Phase p);

enum class ViewpointMode { ours, random, default_right };
enum class FloorLocMode { ours, direct_count };

struct StepRecord {
    int step = 0;
    Phase phase = Phase::Explore;
    DronePose pose_before;
    DronePose pose_after;
    int selected_view = 0;          // camera 1..5 (explore steps)
    std::optional<int> j_star;
    double split_objective = 0.0;
    int escalations = 0;
    bool recognition_found = false;
    std::string claimed_window_id;  // ground truth behind a positive claim
    int choice_point = 0;           // 1..5, 0 when not consulted / refused
    Action action;
};

struct EpisodeTrace {
    std::string task_id;
    std::string target_window_id;
    DronePose start_pose;
    DronePose final_pose;
    // floor localization (not budgeted; recorded separately)
    double ascend_yaw = 0.0;        // yaw snapped onto the facade
    double h_final = 0.0;
    int floorloc_queries = 0;
    bool floorloc_overshoot = false;
    bool floorloc_aborted = false;
    PixelBox bbox_buil;
    std::vector<WaypointRecord> floorloc_waypoints;
    // exploration + approach
    std::vector<StepRecord> steps;
    bool delivery_attempted = false;
    bool interpretation_perturbed = false;
    int f_tar_used = 0;             // floor the pipeline believed in
    Outcome outcome = Outcome::budget_exhausted;
    double path_length = 0.0;       // sum of executed translate distances
    int steps_used = 0;
    bool complete = false;          // footer written
};

struct MissionConfig {
    CameraRig rig;
    SimConfig sim;
    ExploreParams explore;
    ApproachParams approach;
    int step_budget = 30;
    int max_refusals = 3;
    ViewpointMode viewpoint = ViewpointMode::ours;
    FloorLocMode floorloc = FloorLocMode::ours;
    std::uint64_t episode_seed = 0; // drives the random-viewpoint ablation
};

// Full pipeline: request understanding, floor localization, exploration,
// approach. Every failure is encoded as an outcome; only transport-level
// errors from remote backends propagate.
EpisodeTrace run_episode(const TaskSpec& task, const WorldModel& world,
                         const Backends& backends, const MissionConfig& config = {});

// Recomputes the outcome from the trace alone and cross-checks the recorded
// one. Throws MalformedTraceError on a truncated trace.
Outcome classify_outcome(const EpisodeTrace& trace, const TaskSpec& task,
                         const WorldModel& world, const MissionConfig& config = {});

// Re-executes the trace's action list from the start pose.
DronePose replay_trace(const EpisodeTrace& trace, const WorldModel& world,
                       const SimConfig& sim = {});

} // namespace vld
