#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "vld/metrics.hpp"
#include "vld/mission.hpp"
#include "vld/tasks.hpp"
#include "vld/world.hpp"

namespace vld {

struct FileFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// vld-world/1
nlohmann::json world_to_json(const WorldModel& world);
WorldModel world_from_json(const nlohmann::json& j);
void save_world(const WorldModel& world, const std::string& path);
WorldModel load_world(const std::string& path);

// vld-task/1
nlohmann::json tasks_to_json(const std::vector<TaskSpec>& tasks, std::uint64_t world_seed);
std::vector<TaskSpec> tasks_from_json(const nlohmann::json& j);
void save_tasks(const std::vector<TaskSpec>& tasks, std::uint64_t world_seed,
                const std::string& path);
std::vector<TaskSpec> load_tasks(const std::string& path);

// vld-trace/1: line-delimited JSON, header + one record per step + footer
std::string trace_to_jsonl(const EpisodeTrace& trace, const nlohmann::json& config_echo);
EpisodeTrace trace_from_jsonl(const std::string& text);
void save_trace(const EpisodeTrace& trace, const nlohmann::json& config_echo,
                const std::string& path);
EpisodeTrace load_trace(const std::string& path);

nlohmann::json report_to_json(const MetricReport& report);

} // namespace vld
