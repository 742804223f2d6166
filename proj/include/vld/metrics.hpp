#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vld/mission.hpp"
#include "vld/tasks.hpp"
#include "vld/world.hpp"

namespace vld {

struct DataInconsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest obstacle-respecting path: the direct segment when it clears the
// footprint, otherwise the shorter of the two boundary-tangent vertex chains
// around the convex polygon.
double shortest_path_xy(const Vec2& start, const Vec2& goal,
                        const std::vector<Vec2>& footprint);

// 3D treatment: horizontal tangent path plus a single vertical leg.
double shortest_path_length(const Vec3& start, const Vec3& goal,
                            const std::vector<Vec2>& footprint);

struct DifficultySlice {
    int n_tasks = 0;
    double sr = 0.0;
    double spl = 0.0;
    std::optional<double> avg_steps;
};

struct MetricReport {
    int n_tasks = 0;
    double sr = 0.0;
    double spl = 0.0;
    std::optional<double> avg_steps;       // successes only; absent when SR = 0
    std::optional<double> or_fail_rate;    // absent when nothing was claimed
    double fl_fail_rate = 0.0;
    double fl_threshold = 7.0;
    std::map<std::string, DifficultySlice> per_difficulty;
};

double compute_sr(const std::vector<EpisodeTrace>& traces);
std::optional<double> compute_avg_steps(const std::vector<EpisodeTrace>& traces);

// mean of success * shortest / max(traveled, shortest); the shortest path
// runs from the start pose to the target window's standoff point.
double compute_spl(const std::vector<EpisodeTrace>& traces,
                   const std::vector<TaskSpec>& tasks, const WorldModel& world,
                   double standoff_distance = 1.5);

// wrong positive claims / all positive claims, counted per claim
std::optional<double> or_fail_rate(const std::vector<EpisodeTrace>& traces,
                                   const std::vector<TaskSpec>& tasks);

double fl_fail_rate(const std::vector<EpisodeTrace>& traces,
                    const std::vector<TaskSpec>& tasks, const WorldModel& world,
                    double threshold = 7.0);

MetricReport compute_report(const std::vector<EpisodeTrace>& traces,
                            const std::vector<TaskSpec>& tasks, const WorldModel& world,
                            double standoff_distance = 1.5, double fl_threshold = 7.0);

// Aligned plain-text table; one row per labeled report.
std::string render_report_table(
    const std::vector<std::pair<std::string, MetricReport>>& rows);

} // namespace vld
