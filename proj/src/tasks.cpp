#include "vld/tasks.hpp"

#include <algorithm>
#include <cmath>

#include "vld/rng.hpp"

namespace vld {

const char* to_string(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return "Easy";
        case Difficulty::Moderate: return "Moderate";
        case Difficulty::Hard: return "Hard";
    }
    return "Easy";
}

Difficulty difficulty_from_string(const std::string& s) {
    if (s == "Easy") return Difficulty::Easy;
    if (s == "Moderate") return Difficulty::Moderate;
    if (s == "Hard") return Difficulty::Hard;
    throw std::invalid_argument("unknown difficulty: " + s);
}

int min_turns(const Building& building, int start_facade, int target_facade) {
    int n = static_cast<int>(building.footprint.size());
    int cw = ((start_facade - target_facade) % n + n) % n;
    int ccw = ((target_facade - start_facade) % n + n) % n;
    return std::min(cw, ccw);
}

Difficulty difficulty_label(int turns) {
    if (turns < 2) return Difficulty::Easy;
    if (turns <= 3) return Difficulty::Moderate;
    return Difficulty::Hard;
}

namespace {

const char* kRequestTemplates[8] = {
    "Please deliver my package to the window on floor %F% that has a %OBJ% next to it.",
    "I'm on the %F%th floor; look for the window with the %OBJ%.",
    "Drop the parcel at the floor-%F% window marked by a %OBJ%.",
    "My order goes to floor %F%. You'll recognize the window by the %OBJ%.",
    "Bring it up to floor %F%, the window with a %OBJ% beside it.",
    "The delivery window is on floor %F% and has a %OBJ% on the sill.",
    "Leave the box at the %F%th-floor window, the one with the %OBJ%.",
    "Window on floor %F%, distinguished by a %OBJ% - that's mine.",
};

const char* kDistractors[8] = {
    "The weather has been lovely lately.",
    "Ring twice if nobody answers, though that hardly matters from outside.",
    "My neighbor has a similar window, but theirs faces the courtyard.",
    "Last time the courier left it at the lobby, please don't.",
    "The bell downstairs is broken, not that a drone would use it.",
    "I'll be home after six, the package can wait on the ledge.",
    "Careful, the pigeons around here are fearless.",
    "The building entrance is around the corner, but you won't need it.",
};

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

std::string make_request_text(Rng& rng, int floor, const ObjectTag& tag) {
    std::string text = kRequestTemplates[rng.uniform_int(0, 7)];
    text = replace_all(text, "%F%", std::to_string(floor));
    text = replace_all(text, "%OBJ%", tag.describe());
    if (rng.bernoulli(0.7)) {
        text += " ";
        text += kDistractors[rng.uniform_int(0, 7)];
    }
    return text;
}

struct Candidate {
    int building = 0;
    const Window* window = nullptr;
};

} // namespace

TaskSpec generate_task(const WorldModel& world, std::uint64_t seed,
                       const TaskGenParams& params) {
    Rng rng(Rng::mix(seed, "task-gen"));

    std::vector<Candidate> decorated;
    for (std::size_t bi = 0; bi < world.buildings.size(); ++bi) {
        for (const Window& w : world.buildings[bi].windows) {
            if (!w.decorations.empty())
                decorated.push_back({static_cast<int>(bi), &w});
        }
    }
    if (decorated.empty())
        throw NoDecoratedWindowError("world has no decorated windows");

    // requested difficulty for this task
    double r = rng.next_double();
    Difficulty want = r < params.easy_weight ? Difficulty::Easy
                      : r < params.easy_weight + params.moderate_weight
                          ? Difficulty::Moderate
                          : Difficulty::Hard;

    // sample (window, start facade) pairs until the difficulty matches;
    // fall back to the last draw when the world cannot host the request
    Candidate chosen = decorated[rng.uniform_int(0, static_cast<int>(decorated.size()) - 1)];
    int start_facade = 0;
    for (int attempt = 0; attempt < 64; ++attempt) {
        Candidate c = decorated[rng.uniform_int(0, static_cast<int>(decorated.size()) - 1)];
        const Building& b = world.buildings[c.building];
        int n = static_cast<int>(b.footprint.size());
        int facade = rng.uniform_int(0, n - 1);
        chosen = c;
        start_facade = facade;
        if (difficulty_label(min_turns(b, facade, c.window->facade_index)) == want) break;
    }

    const Building& b = world.buildings[chosen.building];
    const Window& w = *chosen.window;

    // start near the base, off the chosen facade's midpoint, facing it
    Vec2 a = b.footprint[start_facade];
    Vec2 c2 = b.footprint[(start_facade + 1) % b.footprint.size()];
    Vec2 mid = (a + c2) * 0.5;
    Vec2 normal = b.facade_normal(start_facade);
    Vec2 start_xy = mid + normal * params.start_standoff;

    TaskSpec task;
    task.world_seed = world.seed;
    task.building_index = chosen.building;
    task.target_window_id = w.id;
    task.f_tar = w.floor;
    task.d_tar = w.decorations.front();
    task.start_pose.position = {start_xy.x, start_xy.y, params.start_altitude};
    task.start_pose.yaw = wrap_angle(std::atan2(-normal.y, -normal.x));
    task.start_facade = start_facade;
    task.min_turns = min_turns(b, start_facade, w.facade_index);
    task.difficulty = difficulty_label(task.min_turns);
    task.request_text = make_request_text(rng, task.f_tar, task.d_tar);
    task.task_id = "task_" + std::to_string(seed);
    return task;
}

std::vector<TaskSpec> generate_tasks(const WorldModel& world, std::uint64_t seed,
                                     int count, const TaskGenParams& params) {
    std::vector<TaskSpec> tasks;
    tasks.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        TaskSpec t = generate_task(world, Rng::mix(seed, "task#" + std::to_string(i)), params);
        t.task_id = "task_" + std::to_string(i);
        tasks.push_back(std::move(t));
    }
    return tasks;
}

} // namespace vld
