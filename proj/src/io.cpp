#include "vld/io.hpp"

#include <fstream>
#include <sstream>

namespace vld {

using nlohmann::json;

namespace {

json vec2_to_json(const Vec2& v) { return json{v.x, v.y}; }
Vec2 vec2_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }
json vec3_to_json(const Vec3& v) { return json{v.x, v.y, v.z}; }
Vec3 vec3_from_json(const json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}
json pose_to_json(const DronePose& p) {
    return json{{"position", vec3_to_json(p.position)}, {"yaw", p.yaw}};
}
DronePose pose_from_json(const json& j) {
    return {vec3_from_json(j.at("position")), j.at("yaw").get<double>()};
}
json box_to_json(const PixelBox& b) { return json{b.x_min, b.x_max, b.y_min, b.y_max}; }
PixelBox box_from_json(const json& j) {
    return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>(), j.at(3).get<int>()};
}
json tag_to_json(const ObjectTag& t) {
    return json{{"category", to_string(t.category)},
                {"color", to_string(t.color)},
                {"label", t.label}};
}
ObjectTag tag_from_json(const json& j) {
    ObjectTag t;
    t.category = category_from_string(j.at("category").get<std::string>());
    t.color = color_from_string(j.at("color").get<std::string>());
    t.label = j.at("label").get<std::string>();
    return t;
}

void require_schema(const json& j, const char* expected) {
    if (!j.contains("schema") || j.at("schema").get<std::string>() != expected)
        throw FileFormatError(std::string("expected schema ") + expected);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileFormatError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileFormatError("cannot write " + path);
    out << content;
}

} // namespace

json world_to_json(const WorldModel& world) {
    json buildings = json::array();
    for (const Building& b : world.buildings) {
        json footprint = json::array();
        for (const Vec2& v : b.footprint) footprint.push_back(vec2_to_json(v));
        json windows = json::array();
        for (const Window& w : b.windows) {
            json decorations = json::array();
            for (const ObjectTag& t : w.decorations) decorations.push_back(tag_to_json(t));
            windows.push_back(json{{"id", w.id},
                                   {"facade_index", w.facade_index},
                                   {"floor", w.floor},
                                   {"center", vec3_to_json(w.center)},
                                   {"width", w.width},
                                   {"height", w.height},
                                   {"decorations", decorations}});
        }
        buildings.push_back(json{{"footprint", footprint},
                                 {"floor_height", b.floor_height},
                                 {"num_floors", b.num_floors},
                                 {"windows", windows}});
    }
    return json{{"schema", "vld-world/1"},
                {"seed", world.seed},
                {"bounds", json{world.bounds.min_x, world.bounds.min_y,
                                world.bounds.max_x, world.bounds.max_y}},
                {"buildings", buildings}};
}

WorldModel world_from_json(const json& j) {
    require_schema(j, "vld-world/1");
    WorldModel world;
    world.seed = j.at("seed").get<std::uint64_t>();
    const json& b4 = j.at("bounds");
    world.bounds = {b4.at(0).get<double>(), b4.at(1).get<double>(),
                    b4.at(2).get<double>(), b4.at(3).get<double>()};
    for (const json& jb : j.at("buildings")) {
        Building b;
        for (const json& v : jb.at("footprint")) b.footprint.push_back(vec2_from_json(v));
        b.floor_height = jb.at("floor_height").get<double>();
        b.num_floors = jb.at("num_floors").get<int>();
        for (const json& jw : jb.at("windows")) {
            Window w;
            w.id = jw.at("id").get<std::string>();
            w.facade_index = jw.at("facade_index").get<int>();
            w.floor = jw.at("floor").get<int>();
            w.center = vec3_from_json(jw.at("center"));
            w.width = jw.at("width").get<double>();
            w.height = jw.at("height").get<double>();
            for (const json& jt : jw.at("decorations")) w.decorations.push_back(tag_from_json(jt));
            b.windows.push_back(std::move(w));
        }
        world.buildings.push_back(std::move(b));
    }
    return world;
}

void save_world(const WorldModel& world, const std::string& path) {
    write_file(path, world_to_json(world).dump(2) + "\n");
}

WorldModel load_world(const std::string& path) {
    return world_from_json(json::parse(read_file(path)));
}

json tasks_to_json(const std::vector<TaskSpec>& tasks, std::uint64_t world_seed) {
    json arr = json::array();
    for (const TaskSpec& t : tasks) {
        arr.push_back(json{{"task_id", t.task_id},
                           {"target_window_id", t.target_window_id},
                           {"building_index", t.building_index},
                           {"f_tar", t.f_tar},
                           {"d_tar", tag_to_json(t.d_tar)},
                           {"request_text", t.request_text},
                           {"start_pose", pose_to_json(t.start_pose)},
                           {"start_facade", t.start_facade},
                           {"difficulty", to_string(t.difficulty)},
                           {"min_turns", t.min_turns}});
    }
    return json{{"schema", "vld-task/1"}, {"world_seed", world_seed}, {"tasks", arr}};
}

std::vector<TaskSpec> tasks_from_json(const json& j) {
    require_schema(j, "vld-task/1");
    std::vector<TaskSpec> tasks;
    std::uint64_t world_seed = j.at("world_seed").get<std::uint64_t>();
    for (const json& jt : j.at("tasks")) {
        TaskSpec t;
        t.task_id = jt.at("task_id").get<std::string>();
        t.world_seed = world_seed;
        t.target_window_id = jt.at("target_window_id").get<std::string>();
        t.building_index = jt.at("building_index").get<int>();
        t.f_tar = jt.at("f_tar").get<int>();
        t.d_tar = tag_from_json(jt.at("d_tar"));
        t.request_text = jt.at("request_text").get<std::string>();
        t.start_pose = pose_from_json(jt.at("start_pose"));
        t.start_facade = jt.at("start_facade").get<int>();
        t.difficulty = difficulty_from_string(jt.at("difficulty").get<std::string>());
        t.min_turns = jt.at("min_turns").get<int>();
        tasks.push_back(std::move(t));
    }
    return tasks;
}

void save_tasks(const std::vector<TaskSpec>& tasks, std::uint64_t world_seed,
                const std::string& path) {
    write_file(path, tasks_to_json(tasks, world_seed).dump(2) + "\n");
}

std::vector<TaskSpec> load_tasks(const std::string& path) {
    return tasks_from_json(json::parse(read_file(path)));
}

std::string trace_to_jsonl(const EpisodeTrace& trace, const json& config_echo) {
    std::ostringstream out;
    json header{{"schema", "vld-trace/1"},
                {"record", "header"},
                {"task_id", trace.task_id},
                {"target_window_id", trace.target_window_id},
                {"start_pose", pose_to_json(trace.start_pose)},
                {"config", config_echo}};
    out << header.dump() << "\n";

    json waypoints = json::array();
    for (const WaypointRecord& w : trace.floorloc_waypoints)
        waypoints.push_back(json{{"height", w.height},
                                 {"f_new", w.f_new},
                                 {"f_cur_after", w.f_cur_after},
                                 {"refused", w.refused}});
    json fl{{"record", "floorloc"},
            {"aborted", trace.floorloc_aborted},
            {"ascend_yaw", trace.ascend_yaw},
            {"h_final", trace.h_final},
            {"queries_used", trace.floorloc_queries},
            {"overshoot", trace.floorloc_overshoot},
            {"bbox_buil", box_to_json(trace.bbox_buil)},
            {"f_tar_used", trace.f_tar_used},
            {"interpretation_perturbed", trace.interpretation_perturbed},
            {"waypoints", waypoints}};
    out << fl.dump() << "\n";

    for (const StepRecord& s : trace.steps) {
        json rec{{"record", "step"},
                 {"step", s.step},
                 {"phase", to_string(s.phase)},
                 {"pose_before", pose_to_json(s.pose_before)},
                 {"pose_after", pose_to_json(s.pose_after)},
                 {"selected_view", s.selected_view},
                 {"split_objective", s.split_objective},
                 {"escalations", s.escalations},
                 {"recognition_found", s.recognition_found},
                 {"claimed_window_id", s.claimed_window_id},
                 {"choice_point", s.choice_point},
                 {"action", json{{"kind", to_string(s.action.kind)},
                                 {"bearing", s.action.bearing},
                                 {"distance", s.action.distance}}}};
        if (s.j_star) rec["j_star"] = *s.j_star;
        out << rec.dump() << "\n";
    }

    json footer{{"record", "footer"},
                {"outcome", to_string(trace.outcome)},
                {"path_length", trace.path_length},
                {"steps_used", trace.steps_used},
                {"delivery_attempted", trace.delivery_attempted},
                {"final_pose", pose_to_json(trace.final_pose)}};
    out << footer.dump() << "\n";
    return out.str();
}

EpisodeTrace trace_from_jsonl(const std::string& text) {
    EpisodeTrace trace;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        std::string record = j.at("record").get<std::string>();
        if (record == "header") {
            require_schema(j, "vld-trace/1");
            trace.task_id = j.at("task_id").get<std::string>();
            trace.target_window_id = j.at("target_window_id").get<std::string>();
            trace.start_pose = pose_from_json(j.at("start_pose"));
            have_header = true;
        } else if (record == "floorloc") {
            trace.floorloc_aborted = j.at("aborted").get<bool>();
            trace.ascend_yaw = j.at("ascend_yaw").get<double>();
            trace.h_final = j.at("h_final").get<double>();
            trace.floorloc_queries = j.at("queries_used").get<int>();
            trace.floorloc_overshoot = j.at("overshoot").get<bool>();
            trace.bbox_buil = box_from_json(j.at("bbox_buil"));
            trace.f_tar_used = j.at("f_tar_used").get<int>();
            trace.interpretation_perturbed = j.at("interpretation_perturbed").get<bool>();
            for (const json& w : j.at("waypoints")) {
                WaypointRecord rec;
                rec.height = w.at("height").get<double>();
                rec.f_new = w.at("f_new").get<int>();
                rec.f_cur_after = w.at("f_cur_after").get<int>();
                rec.refused = w.at("refused").get<bool>();
                trace.floorloc_waypoints.push_back(rec);
            }
        } else if (record == "step") {
            StepRecord s;
            s.step = j.at("step").get<int>();
            std::string phase = j.at("phase").get<std::string>();
            s.phase = phase == "Approach" ? Phase::Approach : Phase::Explore;
            s.pose_before = pose_from_json(j.at("pose_before"));
            s.pose_after = pose_from_json(j.at("pose_after"));
            s.selected_view = j.at("selected_view").get<int>();
            if (j.contains("j_star")) s.j_star = j.at("j_star").get<int>();
            s.split_objective = j.at("split_objective").get<double>();
            s.escalations = j.at("escalations").get<int>();
            s.recognition_found = j.at("recognition_found").get<bool>();
            s.claimed_window_id = j.at("claimed_window_id").get<std::string>();
            s.choice_point = j.at("choice_point").get<int>();
            const json& a = j.at("action");
            s.action.kind = action_kind_from_string(a.at("kind").get<std::string>());
            s.action.bearing = a.at("bearing").get<double>();
            s.action.distance = a.at("distance").get<double>();
            trace.steps.push_back(std::move(s));
        } else if (record == "footer") {
            trace.outcome = outcome_from_string(j.at("outcome").get<std::string>());
            trace.path_length = j.at("path_length").get<double>();
            trace.steps_used = j.at("steps_used").get<int>();
            trace.delivery_attempted = j.at("delivery_attempted").get<bool>();
            trace.final_pose = pose_from_json(j.at("final_pose"));
            trace.complete = true;
        }
    }
    if (!have_header) throw FileFormatError("trace without header record");
    return trace;
}

void save_trace(const EpisodeTrace& trace, const json& config_echo,
                const std::string& path) {
    write_file(path, trace_to_jsonl(trace, config_echo));
}

EpisodeTrace load_trace(const std::string& path) {
    return trace_from_jsonl(read_file(path));
}

json report_to_json(const MetricReport& report) {
    json j{{"schema", "vld-report/1"},
           {"n_tasks", report.n_tasks},
           {"sr", report.sr},
           {"spl", report.spl},
           {"fl_fail_rate", report.fl_fail_rate},
           {"fl_threshold", report.fl_threshold}};
    j["avg_steps"] = report.avg_steps ? json(*report.avg_steps) : json(nullptr);
    j["or_fail_rate"] = report.or_fail_rate ? json(*report.or_fail_rate) : json(nullptr);
    json per = json::object();
    for (const auto& [name, slice] : report.per_difficulty) {
        json s{{"n_tasks", slice.n_tasks}, {"sr", slice.sr}, {"spl", slice.spl}};
        s["avg_steps"] = slice.avg_steps ? json(*slice.avg_steps) : json(nullptr);
        per[name] = s;
    }
    j["per_difficulty"] = per;
    return j;
}

} // namespace vld
