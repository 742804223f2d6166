#include "vld/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "vld/io.hpp"
#include "vld/metrics.hpp"
#include "vld/mission.hpp"
#include "vld/perception.hpp"
#include "vld/remote.hpp"
#include "vld/rng.hpp"
#include "vld/tasks.hpp"
#include "vld/world.hpp"

namespace vld {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunOptions {
    std::string world_file;
    std::string task_file;
    std::string out_dir = "out";
    std::string backend = "oracle";  // oracle | noisy | remote
    std::string noise_file;          // JSON NoiseProfile for the noisy backend
    std::string viewpoint = "ours";  // ours | random | default
    std::string choice = "backend";  // backend | center
    std::string floorloc = "ours";   // ours | direct
    std::string remote_url;
    std::string remote_token;
    std::string prompt_dir;
    std::uint64_t seed = 1;
    int budget = 30;
    int jobs = 1;
    double delta = 5.0;
    double d_max = 40.0;
    double l_max = 10.0;
    int slices = 20;
    double success_radius = 3.0;
    double safety_radius = 0.5;
    double standoff = 1.5;
};

NoiseProfile noise_from_json(const json& j) {
    NoiseProfile p;
    if (j.contains("or_false_positive_rate"))
        p.or_false_positive_rate = j.at("or_false_positive_rate").get<double>();
    if (j.contains("or_false_negative_rate"))
        p.or_false_negative_rate = j.at("or_false_negative_rate").get<double>();
    if (j.contains("refusal_rate")) p.refusal_rate = j.at("refusal_rate").get<double>();
    if (j.contains("parse_error_rate"))
        p.parse_error_rate = j.at("parse_error_rate").get<double>();
    if (j.contains("floor_count_per_floor_rate"))
        p.floor_count_per_floor_rate = j.at("floor_count_per_floor_rate").get<double>();
    if (j.contains("floor_count_error_dist")) {
        p.floor_count_error_dist.clear();
        for (auto& [key, value] : j.at("floor_count_error_dist").items())
            p.floor_count_error_dist[std::stoi(key)] = value.get<double>();
    }
    if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

MissionConfig mission_config(const RunOptions& opt) {
    MissionConfig cfg;
    cfg.step_budget = opt.budget;
    cfg.explore.split.delta = opt.delta;
    cfg.explore.split.d_max = opt.d_max;
    cfg.explore.l_max = opt.l_max;
    cfg.explore.slices = opt.slices;
    cfg.explore.safety_radius = opt.safety_radius;
    cfg.sim.safety_radius = opt.safety_radius;
    cfg.sim.success_radius = opt.success_radius;
    cfg.sim.standoff_distance = opt.standoff;
    cfg.approach.standoff = opt.standoff;
    cfg.approach.l_max = opt.l_max;
    cfg.approach.safety_radius = opt.safety_radius;
    if (opt.viewpoint == "random") cfg.viewpoint = ViewpointMode::random;
    else if (opt.viewpoint == "default") cfg.viewpoint = ViewpointMode::default_right;
    else cfg.viewpoint = ViewpointMode::ours;
    cfg.floorloc = opt.floorloc == "direct" ? FloorLocMode::direct_count
                                            : FloorLocMode::ours;
    cfg.episode_seed = Rng::mix(opt.seed, "episodes");
    return cfg;
}

json config_echo(const RunOptions& opt) {
    return json{{"backend", opt.backend},
                {"viewpoint", opt.viewpoint},
                {"choice", opt.choice},
                {"floorloc", opt.floorloc},
                {"seed", opt.seed},
                {"budget", opt.budget},
                {"delta", opt.delta},
                {"d_max", opt.d_max},
                {"l_max", opt.l_max},
                {"slices", opt.slices},
                {"success_radius", opt.success_radius},
                {"safety_radius", opt.safety_radius},
                {"standoff", opt.standoff},
                {"noise_file", opt.noise_file}};
}

Backends make_backends(const RunOptions& opt, const WorldModel& world,
                       const TaskSpec& task, std::size_t task_ordinal,
                       const NoiseProfile& noise, const MissionConfig& cfg) {
    if (opt.backend == "remote") {
        RemoteConfig rc;
        rc.url = opt.remote_url;
        rc.token = opt.remote_token;
        rc.prompt_dir = opt.prompt_dir;
        rc = remote_config_from_env(rc);
        return make_remote_backends(rc, world, cfg.rig);
    }
    OracleBackendOptions ob;
    if (opt.backend == "noisy") ob.noise = noise;
    ob.episode_key = Rng::mix(opt.seed, "noise#" + std::to_string(task_ordinal));
    ob.center_only_choice = opt.choice == "center";
    ob.deadlock_threshold = cfg.explore.deadlock_threshold;
    ob.sim = cfg.sim;
    ob.rig = cfg.rig;
    return make_oracle_backends(world, task.f_tar, task.d_tar, ob);
}

std::vector<EpisodeTrace> run_batch(const RunOptions& opt, const WorldModel& world,
                                    const std::vector<TaskSpec>& tasks,
                                    const NoiseProfile& noise) {
    MissionConfig cfg = mission_config(opt);
    std::vector<EpisodeTrace> traces(tasks.size());
    std::vector<std::string> errors(tasks.size());
#ifdef _OPENMP
    omp_set_num_threads(std::max(1, opt.jobs));
#endif
#pragma omp parallel for schedule(dynamic) if (opt.jobs > 1)
    for (long i = 0; i < static_cast<long>(tasks.size()); ++i) {
        auto idx = static_cast<std::size_t>(i);
        try {
            Backends backends = make_backends(opt, world, tasks[idx], idx, noise, cfg);
            traces[idx] = run_episode(tasks[idx], world, backends, cfg);
        } catch (const std::exception& e) {
            errors[idx] = e.what();
        }
    }
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty())
            throw std::runtime_error("task " + tasks[i].task_id + ": " + errors[i]);
    return traces;
}

void print_dataset_stats(const WorldModel& world, const std::vector<TaskSpec>& tasks) {
    std::map<std::string, int> categories, difficulties;
    std::map<int, int> floors;
    for (const TaskSpec& t : tasks) {
        ++categories[to_string(t.d_tar.category)];
        ++difficulties[to_string(t.difficulty)];
        ++floors[t.f_tar];
    }
    std::cout << "worlds: " << world.buildings.size() << " buildings, seed "
              << world.seed << "\n";
    std::cout << "tasks: " << tasks.size() << "\n";
    std::cout << "target categories:\n";
    for (const auto& [name, count] : categories)
        std::cout << "  " << name << ": " << count << "\n";
    std::cout << "target floors:\n";
    for (const auto& [floor, count] : floors)
        std::cout << "  floor " << floor << ": " << count << "\n";
    std::cout << "difficulty:\n";
    for (const auto& [name, count] : difficulties)
        std::cout << "  " << name << ": " << count << "\n";
}

int cmd_gen(const std::string& out_dir, std::uint64_t seed, int num_tasks,
            int num_buildings, int min_floors, int max_floors) {
    WorldGenParams wp;
    wp.num_buildings = num_buildings;
    wp.min_floors = min_floors;
    wp.max_floors = max_floors;
    WorldModel world = generate_world(Rng::mix(seed, "world"), wp);
    std::vector<TaskSpec> tasks = generate_tasks(world, Rng::mix(seed, "tasks"), num_tasks);

    fs::create_directories(out_dir);
    save_world(world, out_dir + "/world.json");
    save_tasks(tasks, world.seed, out_dir + "/tasks.json");
    print_dataset_stats(world, tasks);
    std::cout << "wrote " << out_dir << "/world.json and " << out_dir
              << "/tasks.json\n";
    return 0;
}

int write_run_outputs(const RunOptions& opt, const WorldModel& world,
                      const std::vector<TaskSpec>& tasks,
                      const std::vector<EpisodeTrace>& traces,
                      const std::string& label) {
    fs::create_directories(opt.out_dir + "/traces");
    json echo = config_echo(opt);
    for (std::size_t i = 0; i < traces.size(); ++i)
        save_trace(traces[i], echo, opt.out_dir + "/traces/" + tasks[i].task_id + ".jsonl");

    MetricReport report = compute_report(traces, tasks, world, opt.standoff);
    json jr = report_to_json(report);
    jr["config"] = echo;
    std::ofstream(opt.out_dir + "/report.json") << jr.dump(2) << "\n";
    std::string table = render_report_table({{label, report}});
    std::ofstream(opt.out_dir + "/report.txt") << table;
    std::cout << table;
    return 0;
}

int cmd_run(const RunOptions& opt) {
    WorldModel world = load_world(opt.world_file);
    std::vector<TaskSpec> tasks = load_tasks(opt.task_file);
    NoiseProfile noise;
    if (!opt.noise_file.empty()) {
        std::ifstream in(opt.noise_file);
        if (!in) {
            std::cerr << "cannot open noise profile " << opt.noise_file << "\n";
            return 2;
        }
        noise = noise_from_json(json::parse(in));
    }
    std::vector<EpisodeTrace> traces = run_batch(opt, world, tasks, noise);
    return write_run_outputs(opt, world, tasks, traces, opt.viewpoint);
}

int cmd_ablate(const RunOptions& base, const std::string& axis) {
    WorldModel world = load_world(base.world_file);
    std::vector<TaskSpec> tasks = load_tasks(base.task_file);
    NoiseProfile noise;
    if (!base.noise_file.empty()) {
        std::ifstream in(base.noise_file);
        if (!in) {
            std::cerr << "cannot open noise profile " << base.noise_file << "\n";
            return 2;
        }
        noise = noise_from_json(json::parse(in));
    }

    std::vector<std::pair<std::string, RunOptions>> variants;
    if (axis == "viewpoint") {
        for (const char* vp : {"ours", "random", "default"}) {
            RunOptions opt = base;
            opt.viewpoint = vp;
            variants.emplace_back(vp, opt);
        }
    } else if (axis == "choice") {
        for (const char* ch : {"backend", "center"}) {
            RunOptions opt = base;
            opt.choice = ch;
            variants.emplace_back(std::string("choice-") + ch, opt);
        }
    } else if (axis == "floorloc") {
        for (const char* fl : {"ours", "direct"}) {
            RunOptions opt = base;
            opt.floorloc = fl;
            variants.emplace_back(std::string("floorloc-") + fl, opt);
        }
    } else {
        std::cerr << "unknown ablation axis: " << axis
                  << " (expected viewpoint|choice|floorloc)\n";
        return 2;
    }

    std::vector<std::pair<std::string, MetricReport>> rows;
    json out_json = json::object();
    out_json["schema"] = "vld-ablation/1";
    out_json["axis"] = axis;
    for (auto& [label, opt] : variants) {
        std::vector<EpisodeTrace> traces = run_batch(opt, world, tasks, noise);
        MetricReport report = compute_report(traces, tasks, world, opt.standoff);
        rows.emplace_back(label, report);
        json jr = report_to_json(report);
        jr["config"] = config_echo(opt);
        out_json["variants"][label] = jr;

        fs::create_directories(opt.out_dir + "/traces-" + label);
        json echo = config_echo(opt);
        for (std::size_t i = 0; i < traces.size(); ++i)
            save_trace(traces[i], echo,
                       opt.out_dir + "/traces-" + label + "/" + tasks[i].task_id + ".jsonl");
    }
    fs::create_directories(base.out_dir);
    std::ofstream(base.out_dir + "/ablation.json") << out_json.dump(2) << "\n";
    std::string table = render_report_table(rows);
    std::ofstream(base.out_dir + "/ablation.txt") << table;
    std::cout << table;
    return 0;
}

int cmd_report(const std::string& world_file, const std::string& task_file,
               const std::string& trace_dir, const std::string& out_file) {
    WorldModel world = load_world(world_file);
    std::vector<TaskSpec> tasks = load_tasks(task_file);
    std::vector<EpisodeTrace> traces;
    traces.reserve(tasks.size());
    for (const TaskSpec& t : tasks) {
        std::string path = trace_dir + "/" + t.task_id + ".jsonl";
        traces.push_back(load_trace(path));
        // recomputed outcome must agree with the stored one
        Outcome recomputed = classify_outcome(traces.back(), t, world);
        if (recomputed != traces.back().outcome)
            throw MalformedTraceError("trace " + t.task_id +
                                      " outcome disagrees with its records");
    }
    MetricReport report = compute_report(traces, tasks, world);
    json jr = report_to_json(report);
    if (out_file.empty()) {
        std::cout << jr.dump(2) << "\n";
    } else {
        std::ofstream(out_file) << jr.dump(2) << "\n";
        std::cout << render_report_table({{"recomputed", report}});
    }
    return 0;
}

} // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"Window-level drone delivery simulator and evaluation harness"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a world and a task set");
    std::string gen_out = "out";
    std::uint64_t gen_seed = 7;
    int gen_tasks = 50, gen_buildings = 3, gen_min_floors = 2, gen_max_floors = 10;
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--seed", gen_seed, "root seed");
    gen->add_option("--tasks", gen_tasks, "number of tasks");
    gen->add_option("--buildings", gen_buildings, "number of buildings");
    gen->add_option("--min-floors", gen_min_floors, "minimum floors per building");
    gen->add_option("--floors", gen_max_floors, "maximum floors per building");

    // run
    auto* run = app.add_subcommand("run", "Run every task and write traces + report");
    RunOptions opt;
    run->add_option("--world", opt.world_file, "world file")->required();
    run->add_option("--tasks", opt.task_file, "task file")->required();
    run->add_option("--out", opt.out_dir, "output directory");
    run->add_option("--backend", opt.backend, "oracle | noisy | remote");
    run->add_option("--noise", opt.noise_file, "noise profile JSON (noisy backend)");
    run->add_option("--viewpoint", opt.viewpoint, "ours | random | default");
    run->add_option("--choice", opt.choice, "backend | center");
    run->add_option("--floorloc", opt.floorloc, "ours | direct");
    run->add_option("--endpoint", opt.remote_url, "remote endpoint url");
    run->add_option("--token", opt.remote_token, "remote auth token");
    run->add_option("--prompt-dir", opt.prompt_dir, "prompt asset directory");
    run->add_option("--seed", opt.seed, "root seed");
    run->add_option("--budget", opt.budget, "exploration step budget");
    run->add_option("--jobs", opt.jobs, "concurrent episodes");
    run->add_option("--delta", opt.delta, "split mean-difference threshold (m)");
    run->add_option("--dmax", opt.d_max, "split far cutoff (m)");
    run->add_option("--lmax", opt.l_max, "max translation per step (m)");
    run->add_option("--slices", opt.slices, "slice count x");
    run->add_option("--success-radius", opt.success_radius, "delivery radius (m)");
    run->add_option("--safety-radius", opt.safety_radius, "collision inflation (m)");
    run->add_option("--standoff", opt.standoff, "delivery standoff (m)");

    // ablate
    auto* ablate = app.add_subcommand("ablate", "Run ablation variants side by side");
    RunOptions abl = opt;
    std::string axis = "viewpoint";
    ablate->add_option("--world", abl.world_file, "world file")->required();
    ablate->add_option("--tasks", abl.task_file, "task file")->required();
    ablate->add_option("--out", abl.out_dir, "output directory");
    ablate->add_option("--axis", axis, "viewpoint | choice | floorloc");
    ablate->add_option("--backend", abl.backend, "oracle | noisy");
    ablate->add_option("--noise", abl.noise_file, "noise profile JSON");
    ablate->add_option("--seed", abl.seed, "root seed");
    ablate->add_option("--budget", abl.budget, "exploration step budget");
    ablate->add_option("--jobs", abl.jobs, "concurrent episodes");

    // report
    auto* rep = app.add_subcommand("report", "Recompute metrics from stored traces");
    std::string rep_world, rep_tasks, rep_traces, rep_out;
    rep->add_option("--world", rep_world, "world file")->required();
    rep->add_option("--tasks", rep_tasks, "task file")->required();
    rep->add_option("--traces", rep_traces, "trace directory")->required();
    rep->add_option("--out", rep_out, "output report JSON");

    try {
        std::vector<const char*> argv;
        argv.push_back("vld");
        for (const std::string& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (gen->parsed())
            return cmd_gen(gen_out, gen_seed, gen_tasks, gen_buildings, gen_min_floors,
                           gen_max_floors);
        if (run->parsed()) return cmd_run(opt);
        if (ablate->parsed()) return cmd_ablate(abl, axis);
        if (rep->parsed()) return cmd_report(rep_world, rep_tasks, rep_traces, rep_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace vld
