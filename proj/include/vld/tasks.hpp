#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vld/world.hpp"

namespace vld {

enum class Difficulty { Easy, Moderate, Hard };

const char* to_string(Difficulty d);
Difficulty difficulty_from_string(const std::string& s);

struct TaskSpec {
    std::string task_id;
    std::uint64_t world_seed = 0;
    std::string target_window_id;
    int building_index = 0;
    int f_tar = 1;
    ObjectTag d_tar;
    std::string request_text;
    DronePose start_pose;
    int start_facade = 0;
    Difficulty difficulty = Difficulty::Easy;
    int min_turns = 0;
};

struct NoDecoratedWindowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Corner roundings on the shorter boundary direction between the facade the
// start pose faces and the target window's facade; 0 when they coincide.
int min_turns(const Building& building, int start_facade, int target_facade);

// <2 Easy, 2..3 Moderate, >3 Hard
Difficulty difficulty_label(int turns);

struct TaskGenParams {
    double start_standoff = 10.0;  // distance from the facade
    double start_altitude = 2.0;
    double easy_weight = 0.5;      // requested difficulty mix
    double moderate_weight = 0.3;
    double hard_weight = 0.2;
};

// One task: a decorated window, a start pose near the building base on a
// random side biased toward the requested difficulty mix, and templated
// request text with distractor clauses.
TaskSpec generate_task(const WorldModel& world, std::uint64_t seed,
                       const TaskGenParams& params = {});

std::vector<TaskSpec> generate_tasks(const WorldModel& world, std::uint64_t seed,
                                     int count, const TaskGenParams& params = {});

} // namespace vld
