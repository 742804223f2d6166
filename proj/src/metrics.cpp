#include "vld/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "vld/sim.hpp"

namespace vld {

double shortest_path_xy(const Vec2& start, const Vec2& goal,
                        const std::vector<Vec2>& footprint) {
    if ((goal - start).norm() < 1e-12) return 0.0;
    if (!segment_intersects_polygon(start, goal, footprint))
        return (goal - start).norm();

    // both tangent chains are arcs of the hull of {polygon, start, goal}
    std::vector<Vec2> pts = footprint;
    pts.push_back(start);
    pts.push_back(goal);
    std::vector<Vec2> hull = convex_hull(std::move(pts));

    auto index_of = [&](const Vec2& p) {
        for (std::size_t i = 0; i < hull.size(); ++i)
            if ((hull[i] - p).norm() < 1e-9) return static_cast<int>(i);
        return -1;
    };
    int si = index_of(start);
    int gi = index_of(goal);
    if (si < 0 || gi < 0) {
        // start or goal inside the hull of the obstacle: no tangent path;
        // callers keep poses outside footprints so this is defensive only
        return (goal - start).norm();
    }
    const int n = static_cast<int>(hull.size());
    double arc1 = 0.0, arc2 = 0.0;
    for (int i = si; i != gi; i = (i + 1) % n)
        arc1 += (hull[(i + 1) % n] - hull[i]).norm();
    for (int i = gi; i != si; i = (i + 1) % n)
        arc2 += (hull[(i + 1) % n] - hull[i]).norm();
    return std::min(arc1, arc2);
}

double shortest_path_length(const Vec3& start, const Vec3& goal,
                            const std::vector<Vec2>& footprint) {
    return shortest_path_xy(start.xy(), goal.xy(), footprint) +
           std::abs(goal.z - start.z);
}

double compute_sr(const std::vector<EpisodeTrace>& traces) {
    if (traces.empty()) return 0.0;
    int wins = 0;
    for (const EpisodeTrace& t : traces)
        if (t.outcome == Outcome::success) ++wins;
    return static_cast<double>(wins) / traces.size();
}

std::optional<double> compute_avg_steps(const std::vector<EpisodeTrace>& traces) {
    int wins = 0;
    double total = 0.0;
    for (const EpisodeTrace& t : traces) {
        if (t.outcome == Outcome::success) {
            ++wins;
            total += t.steps_used;
        }
    }
    if (wins == 0) return std::nullopt;
    return total / wins;
}

namespace {

double shortest_for_task(const TaskSpec& task, const WorldModel& world,
                         double standoff_distance) {
    int bi = 0;
    const Window* w = world.find_window(task.target_window_id, &bi);
    if (!w) throw DataInconsistencyError("task references an unknown window");
    Vec3 goal = window_standoff_point(world, *w, bi, standoff_distance);
    return shortest_path_length(task.start_pose.position, goal,
                                world.buildings[bi].footprint);
}

} // namespace

double compute_spl(const std::vector<EpisodeTrace>& traces,
                   const std::vector<TaskSpec>& tasks, const WorldModel& world,
                   double standoff_distance) {
    if (traces.size() != tasks.size())
        throw DataInconsistencyError("one trace per task required");
    if (traces.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        if (traces[i].outcome != Outcome::success) continue;
        double shortest = shortest_for_task(tasks[i], world, standoff_distance);
        double traveled = traces[i].path_length;
        if (traveled <= 0.0 && shortest > 0.0)
            throw DataInconsistencyError("success with zero traveled distance");
        total += shortest / std::max(traveled, shortest);
    }
    return total / traces.size();
}

std::optional<double> or_fail_rate(const std::vector<EpisodeTrace>& traces,
                                   const std::vector<TaskSpec>& tasks) {
    if (traces.size() != tasks.size())
        throw DataInconsistencyError("one trace per task required");
    int claims = 0, wrong = 0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        for (const StepRecord& s : traces[i].steps) {
            if (!s.recognition_found) continue;
            ++claims;
            if (s.claimed_window_id != tasks[i].target_window_id) ++wrong;
        }
    }
    if (claims == 0) return std::nullopt;
    return static_cast<double>(wrong) / claims;
}

double fl_fail_rate(const std::vector<EpisodeTrace>& traces,
                    const std::vector<TaskSpec>& tasks, const WorldModel& world,
                    double threshold) {
    if (traces.size() != tasks.size())
        throw DataInconsistencyError("one trace per task required");
    if (traces.empty()) return 0.0;
    int failed = 0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const Building& b =
            world.buildings.at(static_cast<std::size_t>(tasks[i].building_index));
        double h_tar = target_height(b, tasks[i].f_tar);
        if (fl_failed(traces[i].h_final, h_tar, threshold)) ++failed;
    }
    return static_cast<double>(failed) / traces.size();
}

MetricReport compute_report(const std::vector<EpisodeTrace>& traces,
                            const std::vector<TaskSpec>& tasks, const WorldModel& world,
                            double standoff_distance, double fl_threshold) {
    MetricReport r;
    r.n_tasks = static_cast<int>(traces.size());
    r.sr = compute_sr(traces);
    r.spl = compute_spl(traces, tasks, world, standoff_distance);
    r.avg_steps = compute_avg_steps(traces);
    r.or_fail_rate = or_fail_rate(traces, tasks);
    r.fl_fail_rate = fl_fail_rate(traces, tasks, world, fl_threshold);
    r.fl_threshold = fl_threshold;

    for (Difficulty d : {Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard}) {
        std::vector<EpisodeTrace> sub_traces;
        std::vector<TaskSpec> sub_tasks;
        for (std::size_t i = 0; i < traces.size(); ++i) {
            if (tasks[i].difficulty == d) {
                sub_traces.push_back(traces[i]);
                sub_tasks.push_back(tasks[i]);
            }
        }
        if (sub_traces.empty()) continue;
        DifficultySlice slice;
        slice.n_tasks = static_cast<int>(sub_traces.size());
        slice.sr = compute_sr(sub_traces);
        slice.spl = compute_spl(sub_traces, sub_tasks, world, standoff_distance);
        slice.avg_steps = compute_avg_steps(sub_traces);
        r.per_difficulty[to_string(d)] = slice;
    }
    return r;
}

std::string render_report_table(
    const std::vector<std::pair<std::string, MetricReport>>& rows) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-18s %8s %8s %12s %14s %14s\n", "Configuration",
                  "SR (%)", "SPL (%)", "Avg Steps", "FL Fail (%)", "OR Fail (%)");
    out << line;
    out << std::string(78, '-') << "\n";
    for (const auto& [label, r] : rows) {
        char steps[32], orf[32];
        if (r.avg_steps) std::snprintf(steps, sizeof(steps), "%.2f", *r.avg_steps);
        else std::snprintf(steps, sizeof(steps), "-");
        if (r.or_fail_rate) std::snprintf(orf, sizeof(orf), "%.1f", *r.or_fail_rate * 100.0);
        else std::snprintf(orf, sizeof(orf), "-");
        std::snprintf(line, sizeof(line), "%-18s %8.1f %8.1f %12s %14.1f %14s\n",
                      label.c_str(), r.sr * 100.0, r.spl * 100.0, steps,
                      r.fl_fail_rate * 100.0, orf);
        out << line;
    }
    return out.str();
}

} // namespace vld
