#include "sawei/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sawei/errors.hpp"
#include "sawei/stats.hpp"
#include "sawei/trace_io.hpp"

namespace sawei {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (const auto it = j.find(key); it != j.end()) {
        out = it->get<T>();
    }
}

json gp_to_json(const GpConfig& gp) {
    return {{"noise_variance", gp.noise_variance},
            {"fit_restarts", gp.fit_restarts},
            {"lengthscale_bounds", {gp.lengthscale_bounds.lower, gp.lengthscale_bounds.upper}},
            {"variance_bounds", {gp.variance_bounds.lower, gp.variance_bounds.upper}},
            {"max_iterations", gp.max_iterations}};
}

GpConfig gp_from_json(const json& j, GpConfig gp) {
    read_if(j, "noise_variance", gp.noise_variance);
    read_if(j, "fit_restarts", gp.fit_restarts);
    read_if(j, "max_iterations", gp.max_iterations);
    if (const auto it = j.find("lengthscale_bounds"); it != j.end()) {
        gp.lengthscale_bounds = {it->at(0).get<double>(), it->at(1).get<double>()};
    }
    if (const auto it = j.find("variance_bounds"); it != j.end()) {
        gp.variance_bounds = {it->at(0).get<double>(), it->at(1).get<double>()};
    }
    return gp;
}

json search_to_json(const SearchBudget& s) {
    return {{"n_random", s.n_random},
            {"n_local_starts", s.n_local_starts},
            {"local_steps", s.local_steps},
            {"step_scale", s.step_scale}};
}

SearchBudget search_from_json(const json& j, SearchBudget s) {
    read_if(j, "n_random", s.n_random);
    read_if(j, "n_local_starts", s.n_local_starts);
    read_if(j, "local_steps", s.local_steps);
    read_if(j, "step_scale", s.step_scale);
    return s;
}

json controller_to_json(const ControllerConfig& c) {
    return {{"initial_alpha", c.initial_alpha},
            {"epsilon", c.epsilon},
            {"delta_alpha", c.delta_alpha},
            {"horizon", c.horizon},
            {"window", c.window},
            {"attitude_mode", to_string(c.attitude_mode)},
            {"exploit_term", to_string(c.exploit_term)},
            {"adjust_enabled", c.adjust_enabled}};
}

TaskSpec task_from_json(const json& j, const fs::path& base_dir) {
    TaskSpec task;
    if (j.contains("table")) {
        task.table = j.at("table").get<std::string>();
        if (task.table.is_relative() && !base_dir.empty()) {
            task.table = base_dir / task.table;
        }
        task.name = j.value("name", task.table.stem().string());
        task.instances = {1};
        return task;
    }
    if (!j.contains("function")) {
        throw ParseError("task needs a \"function\" or a \"table\" key");
    }
    task.function = parse_function_id(j.at("function").get<std::string>());
    task.dimension = j.value("dimension", std::size_t{2});
    if (const auto it = j.find("instances"); it != j.end()) {
        if (it->is_number_integer()) {
            const auto n = it->get<std::uint64_t>();
            task.instances.clear();
            for (std::uint64_t i = 1; i <= n; ++i) {
                task.instances.push_back(i);
            }
        } else {
            task.instances = it->get<std::vector<std::uint64_t>>();
        }
    }
    task.name = j.value("name", to_string(*task.function) + "_" + std::to_string(task.dimension) + "d");
    return task;
}

json task_to_json(const TaskSpec& task) {
    if (!task.function) {
        return {{"table", task.table.string()}, {"name", task.name}};
    }
    return {{"function", to_string(*task.function)},
            {"dimension", task.dimension},
            {"instances", task.instances},
            {"name", task.name}};
}

ScheduleEntry schedule_from_json(const json& j, const ControllerConfig& base_controller) {
    if (j.is_string()) {
        auto policy = parse_schedule(j.get<std::string>());
        return {schedule_name(policy), std::move(policy), std::nullopt};
    }
    if (!j.is_object() || !j.contains("type")) {
        throw ParseError("schedule entries are strings or objects with a \"type\" key");
    }
    auto policy = parse_schedule(j.at("type").get<std::string>());
    ScheduleEntry entry{j.value("name", schedule_name(policy)), std::move(policy), std::nullopt};
    if (const auto it = j.find("controller"); it != j.end()) {
        entry.controller = controller_from_json(*it, base_controller);
    }
    return entry;
}

std::vector<std::uint64_t> seeds_from_json(const json& j) {
    if (j.is_object()) {
        const auto count = j.at("count").get<std::uint64_t>();
        const auto start = j.value("start", std::uint64_t{0});
        std::vector<std::uint64_t> out;
        for (std::uint64_t i = 0; i < count; ++i) {
            out.push_back(start + i);
        }
        return out;
    }
    return j.get<std::vector<std::uint64_t>>();
}

struct Job {
    std::size_t task;
    std::uint64_t instance;
    std::size_t schedule;
    std::uint64_t seed;
};

std::string run_stem(const std::string& task, std::uint64_t instance, const std::string& schedule,
                     std::uint64_t seed) {
    return sanitize_name(task) + "__i" + std::to_string(instance) + "__" +
           sanitize_name(schedule) + "__s" + std::to_string(seed);
}

std::string aggregate_file(const std::string& task, const std::string& schedule) {
    return "aggregates/" + sanitize_name(task) + "__" + sanitize_name(schedule) + ".json";
}

std::unique_ptr<Objective> make_objective(const TaskSpec& task, std::uint64_t instance) {
    if (task.function) {
        return std::make_unique<SyntheticObjective>(*task.function, task.dimension, instance);
    }
    return std::make_unique<TabularObjective>(load_tabular(task.table));
}

std::string format_csv(double v) { return format_double(v); }

}  // namespace

std::vector<std::uint64_t> TaskSpec::instance_ids() const {
    return function ? instances : std::vector<std::uint64_t>{1};
}

std::vector<std::unique_ptr<Objective>> TaskSpec::objectives() const {
    std::vector<std::unique_ptr<Objective>> out;
    for (const auto instance : instance_ids()) {
        out.push_back(make_objective(*this, instance));
    }
    return out;
}

json to_json(const RunConfig& c) {
    return {{"init_design", {{"kind", to_string(c.init_design.kind)}, {"size", c.init_design.size}}},
            {"bo_budget", c.bo_budget},
            {"controller", controller_to_json(c.controller)},
            {"gp", gp_to_json(c.gp)},
            {"search", search_to_json(c.search)},
            {"ucb_beta", c.ucb_beta},
            {"hedge_eta", c.hedge_eta},
            {"warm_start_gp", c.warm_start_gp}};
}

ControllerConfig controller_from_json(const json& j, ControllerConfig c) {
    read_if(j, "initial_alpha", c.initial_alpha);
    read_if(j, "epsilon", c.epsilon);
    read_if(j, "delta_alpha", c.delta_alpha);
    read_if(j, "horizon", c.horizon);
    read_if(j, "window", c.window);
    read_if(j, "adjust_enabled", c.adjust_enabled);
    if (const auto it = j.find("attitude_mode"); it != j.end()) {
        c.attitude_mode = parse_attitude_mode(it->get<std::string>());
    }
    if (const auto it = j.find("exploit_term"); it != j.end()) {
        c.exploit_term = parse_exploit_term(it->get<std::string>());
    }
    return c;
}

RunConfig run_config_from_json(const json& j, RunConfig c) {
    if (const auto it = j.find("init_design"); it != j.end()) {
        if (it->contains("kind")) {
            c.init_design.kind = parse_design_kind(it->at("kind").get<std::string>());
        }
        read_if(*it, "size", c.init_design.size);
    }
    read_if(j, "bo_budget", c.bo_budget);
    read_if(j, "ucb_beta", c.ucb_beta);
    read_if(j, "hedge_eta", c.hedge_eta);
    read_if(j, "warm_start_gp", c.warm_start_gp);
    if (const auto it = j.find("controller"); it != j.end()) {
        c.controller = controller_from_json(*it, c.controller);
    }
    if (const auto it = j.find("gp"); it != j.end()) {
        c.gp = gp_from_json(*it, c.gp);
    }
    if (const auto it = j.find("search"); it != j.end()) {
        c.search = search_from_json(*it, c.search);
    }
    return c;
}

void ExperimentConfig::validate() const {
    if (tasks.empty() || schedules.empty() || seeds.empty()) {
        throw std::invalid_argument("experiment needs nonempty tasks, schedules and seeds");
    }
    std::set<std::string> names;
    for (const auto& t : tasks) {
        if (!names.insert(t.name).second) {
            throw std::invalid_argument("duplicate task name: " + t.name);
        }
        if (t.function && (t.dimension < 1 || t.instances.empty())) {
            throw std::invalid_argument("task " + t.name + " needs d >= 1 and an instance");
        }
    }
    names.clear();
    for (const auto& s : schedules) {
        if (!names.insert(s.name).second) {
            throw std::invalid_argument("duplicate schedule name: " + s.name);
        }
        sawei::validate(s.policy);
        if (s.controller) {
            s.controller->validate();
        }
    }
    if (workers < 1) {
        throw std::invalid_argument("workers must be at least 1");
    }
    run_config.validate();
}

ExperimentConfig ExperimentConfig::from_json(const json& j, const fs::path& base_dir) {
    try {
        ExperimentConfig cfg;
        if (const auto it = j.find("run_config"); it != j.end()) {
            cfg.run_config = run_config_from_json(*it);
        }
        for (const auto& t : j.at("tasks")) {
            cfg.tasks.push_back(task_from_json(t, base_dir));
        }
        for (const auto& s : j.at("schedules")) {
            cfg.schedules.push_back(schedule_from_json(s, cfg.run_config.controller));
        }
        cfg.seeds = seeds_from_json(j.at("seeds"));
        if (const auto it = j.find("output_dir"); it != j.end()) {
            cfg.output_dir = it->get<std::string>();
        }
        read_if(j, "workers", cfg.workers);
        return cfg;
    } catch (const json::exception& e) {
        throw ParseError(std::string("experiment config: ") + e.what());
    }
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open config " + path.string());
    }
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return from_json(j, path.parent_path());
}

json ExperimentConfig::to_json() const {
    json tasks_json = json::array();
    for (const auto& t : tasks) {
        tasks_json.push_back(task_to_json(t));
    }
    json schedules_json = json::array();
    for (const auto& s : schedules) {
        json e = {{"type", schedule_name(s.policy)}, {"name", s.name}};
        if (s.controller) {
            e["controller"] = controller_to_json(*s.controller);
        }
        schedules_json.push_back(std::move(e));
    }
    return {{"tasks", tasks_json},
            {"schedules", schedules_json},
            {"seeds", seeds},
            {"run_config", sawei::to_json(run_config)},
            {"workers", workers}};
}

void apply_seed_offset(ExperimentConfig& config) {
    const char* raw = std::getenv("SAWEI_SEED_OFFSET");
    if (raw == nullptr || *raw == '\0') {
        return;
    }
    std::int64_t offset = 0;
    try {
        std::size_t used = 0;
        offset = std::stoll(raw, &used);
        if (used != std::string(raw).size()) {
            throw std::invalid_argument(raw);
        }
    } catch (const std::exception&) {
        throw ParseError(std::string("SAWEI_SEED_OFFSET is not an integer: ") + raw);
    }
    for (auto& s : config.seeds) {
        s = static_cast<std::uint64_t>(static_cast<std::int64_t>(s) + offset);
    }
}

json AggregateCurve::to_json() const {
    return {{"task", task},
            {"schedule", schedule},
            {"steps", iqm_regret.size()},
            {"runs", runs},
            {"iqm_regret", iqm_regret},
            {"iqm_log10_regret", iqm_log10_regret},
            {"final_iqm_regret", final_iqm_regret},
            {"final_iqm_log10_regret", final_iqm_log10_regret}};
}

AggregateCurve AggregateCurve::from_json(const json& j) {
    try {
        AggregateCurve c;
        c.task = j.at("task").get<std::string>();
        c.schedule = j.at("schedule").get<std::string>();
        c.runs = j.at("runs").get<std::size_t>();
        c.iqm_regret = j.at("iqm_regret").get<std::vector<double>>();
        c.iqm_log10_regret = j.at("iqm_log10_regret").get<std::vector<double>>();
        c.final_iqm_regret = j.at("final_iqm_regret").get<double>();
        c.final_iqm_log10_regret = j.at("final_iqm_log10_regret").get<double>();
        return c;
    } catch (const json::exception& e) {
        throw ParseError(std::string("aggregate curve: ") + e.what());
    }
}

std::size_t ExperimentResult::aborted() const {
    return static_cast<std::size_t>(
        std::count_if(runs.begin(), runs.end(), [](const RunRecord& r) { return !r.ok; }));
}

std::string sanitize_name(const std::string& name) {
    std::string out;
    out.reserve(name.size());
    for (const char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-') {
            out += c;
        } else if (c == ':') {
            out += '-';
        } else {
            out += '_';
        }
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const fs::path out = config.output_dir.empty() ? fs::path(".") : config.output_dir;
    fs::create_directories(out / "traces");
    fs::create_directories(out / "aggregates");

    std::vector<Job> jobs;
    for (std::size_t t = 0; t < config.tasks.size(); ++t) {
        for (const auto instance : config.tasks[t].instance_ids()) {
            for (std::size_t s = 0; s < config.schedules.size(); ++s) {
                for (const auto seed : config.seeds) {
                    jobs.push_back({t, instance, s, seed});
                }
            }
        }
    }

    ExperimentResult result;
    result.runs.resize(jobs.size());
    std::vector<std::vector<TraceRow>> completed(jobs.size());
    std::atomic<std::size_t> next{0};

    const auto work = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const Job& job = jobs[i];
            const TaskSpec& task = config.tasks[job.task];
            const ScheduleEntry& entry = config.schedules[job.schedule];
            RunRecord& rec = result.runs[i];
            rec.task = task.name;
            rec.instance = job.instance;
            rec.schedule = entry.name;
            rec.seed = job.seed;
            const std::string stem = run_stem(task.name, job.instance, entry.name, job.seed);
            rec.trace_file = fs::path("traces") / (stem + ".csv");
            rec.summary_file = fs::path("traces") / (stem + ".json");
            try {
                RunConfig rc = config.run_config;
                rc.schedule = entry.policy;
                rc.seed = job.seed;
                if (entry.controller) {
                    rc.controller = *entry.controller;
                }
                const auto objective = make_objective(task, job.instance);
                RunTrace trace = run_bo(*objective, rc);
                write_trace_csv(trace, out / rec.trace_file);
                write_text_file(out / rec.summary_file, run_summary(trace).dump(2) + "\n");
                rec.adjust_events = trace.adjust_events();
                rec.final_regret = trace.final_regret();
                rec.wall_seconds = trace.rows.empty() ? 0.0 : trace.rows.back().wall_seconds;
                rec.ok = trace.complete();
                if (!rec.ok) {
                    rec.error = trace.failure.value_or("incomplete trace");
                } else {
                    completed[i] = std::move(trace.rows);
                }
            } catch (const std::exception& e) {
                rec.ok = false;
                rec.error = e.what();
            }
        }
    };

    const std::size_t n_workers = std::min(config.workers, std::max<std::size_t>(jobs.size(), 1));
    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    // Aggregation and the manifest are written by this thread only.
    const std::size_t init = config.run_config.init_design.size;
    const std::size_t steps = config.run_config.bo_budget;
    json aggregates = json::array();
    for (const auto& task : config.tasks) {
        for (const auto& entry : config.schedules) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < jobs.size(); ++i) {
                if (result.runs[i].ok && result.runs[i].task == task.name &&
                    result.runs[i].schedule == entry.name) {
                    members.push_back(i);
                }
            }
            if (members.empty()) {
                continue;
            }
            AggregateCurve curve;
            curve.task = task.name;
            curve.schedule = entry.name;
            curve.runs = members.size();
            std::vector<double> regret(members.size());
            std::vector<double> logs(members.size());
            for (std::size_t s = 0; s < steps; ++s) {
                for (std::size_t m = 0; m < members.size(); ++m) {
                    const TraceRow& row = completed[members[m]][init + s];
                    regret[m] = row.regret;
                    logs[m] = row.log10_regret;
                }
                curve.iqm_regret.push_back(iqm(regret));
                curve.iqm_log10_regret.push_back(iqm(logs));
            }
            curve.final_iqm_regret = curve.iqm_regret.back();
            curve.final_iqm_log10_regret = curve.iqm_log10_regret.back();
            const std::string file = aggregate_file(task.name, entry.name);
            write_text_file(out / file, curve.to_json().dump(2) + "\n");
            aggregates.push_back({{"task", task.name}, {"schedule", entry.name}, {"file", file}});
            result.curves.push_back(std::move(curve));
        }
    }

    json runs = json::array();
    json aborted = json::array();
    for (const auto& rec : result.runs) {
        json r = {{"task", rec.task},
                  {"instance", rec.instance},
                  {"schedule", rec.schedule},
                  {"seed", rec.seed},
                  {"trace", rec.trace_file.generic_string()},
                  {"summary", rec.summary_file.generic_string()},
                  {"status", rec.ok ? "ok" : "aborted"}};
        if (!rec.ok) {
            r["error"] = rec.error;
            aborted.push_back({{"trace", rec.trace_file.generic_string()}, {"error", rec.error}});
        }
        runs.push_back(std::move(r));
    }
    json task_names = json::array();
    for (const auto& t : config.tasks) {
        task_names.push_back(t.name);
    }
    json schedule_names = json::array();
    for (const auto& s : config.schedules) {
        schedule_names.push_back(s.name);
    }
    const json manifest = {{"format", 1},
                           {"config", config.to_json()},
                           {"tasks", task_names},
                           {"schedules", schedule_names},
                           {"seeds", config.seeds},
                           {"init_size", init},
                           {"bo_budget", steps},
                           {"runs", runs},
                           {"aggregates", aggregates},
                           {"aborted", aborted}};
    result.manifest = out / "manifest.json";
    write_text_file(result.manifest, manifest.dump(2) + "\n");
    return result;
}

RankReport ranks_per_step(const std::vector<AggregateCurve>& curves) {
    if (curves.empty()) {
        throw GridMismatch("no curves to rank");
    }
    RankReport report;
    for (const auto& c : curves) {
        if (std::find(report.tasks.begin(), report.tasks.end(), c.task) == report.tasks.end()) {
            report.tasks.push_back(c.task);
        }
        if (std::find(report.schedules.begin(), report.schedules.end(), c.schedule) ==
            report.schedules.end()) {
            report.schedules.push_back(c.schedule);
        }
    }
    report.steps = curves.front().iqm_regret.size();
    if (report.steps == 0) {
        throw GridMismatch("curves have no steps");
    }
    const std::size_t n_tasks = report.tasks.size();
    const std::size_t n_sched = report.schedules.size();
    std::vector<std::vector<const AggregateCurve*>> grid(
        n_tasks, std::vector<const AggregateCurve*>(n_sched, nullptr));
    for (const auto& c : curves) {
        if (c.iqm_regret.size() != report.steps) {
            throw GridMismatch("step grid of " + c.task + "/" + c.schedule + " has " +
                               std::to_string(c.iqm_regret.size()) + " steps, expected " +
                               std::to_string(report.steps));
        }
        const auto t = static_cast<std::size_t>(
            std::find(report.tasks.begin(), report.tasks.end(), c.task) - report.tasks.begin());
        const auto s = static_cast<std::size_t>(
            std::find(report.schedules.begin(), report.schedules.end(), c.schedule) -
            report.schedules.begin());
        if (grid[t][s] != nullptr) {
            throw GridMismatch("duplicate curve for " + c.task + "/" + c.schedule);
        }
        grid[t][s] = &c;
    }
    for (std::size_t t = 0; t < n_tasks; ++t) {
        for (std::size_t s = 0; s < n_sched; ++s) {
            if (grid[t][s] == nullptr) {
                throw GridMismatch("missing curve for " + report.tasks[t] + "/" +
                                   report.schedules[s]);
            }
        }
    }

    report.task_ranks.assign(n_tasks, {});
    report.mean_ranks.assign(report.steps, std::vector<double>(n_sched, 0.0));
    std::vector<double> values(n_sched);
    for (std::size_t t = 0; t < n_tasks; ++t) {
        for (std::size_t step = 0; step < report.steps; ++step) {
            for (std::size_t s = 0; s < n_sched; ++s) {
                values[s] = grid[t][s]->iqm_regret[step];
            }
            auto ranks = average_ranks(values);
            for (std::size_t s = 0; s < n_sched; ++s) {
                report.mean_ranks[step][s] += ranks[s] / static_cast<double>(n_tasks);
            }
            report.task_ranks[t].push_back(std::move(ranks));
        }
    }
    std::vector<double> finals(n_tasks);
    for (std::size_t s = 0; s < n_sched; ++s) {
        for (std::size_t t = 0; t < n_tasks; ++t) {
            finals[t] = report.task_ranks[t].back()[s];
        }
        report.final_ranks.push_back(iqm(finals));
    }
    return report;
}

AblationGrid AblationGrid::from_json(const json& j) {
    try {
        AblationGrid grid;
        read_if(j, "delta_alpha", grid.delta_alpha);
        read_if(j, "epsilon", grid.epsilon);
        if (const auto it = j.find("attitude_modes"); it != j.end()) {
            grid.attitude_modes.clear();
            for (const auto& m : *it) {
                grid.attitude_modes.push_back(parse_attitude_mode(m.get<std::string>()));
            }
        }
        return grid;
    } catch (const json::exception& e) {
        throw ParseError(std::string("ablation grid: ") + e.what());
    }
}

std::vector<double> min_max_normalize(const std::vector<double>& values) {
    if (values.empty()) {
        return {};
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    std::vector<double> out(values.size(), 0.0);
    const double span = *hi - *lo;
    if (span > 0.0) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            out[i] = (values[i] - *lo) / span;
        }
    }
    return out;
}

SweepResult ablation_sweep(const ExperimentConfig& base, const AblationGrid& grid) {
    if (grid.size() == 0) {
        throw std::invalid_argument("ablation grid is empty");
    }
    ExperimentConfig cfg = base;
    cfg.schedules.clear();
    SweepResult result;
    for (const double da : grid.delta_alpha) {
        for (const AttitudeMode mode : grid.attitude_modes) {
            for (const double eps : grid.epsilon) {
                ControllerConfig cc = base.run_config.controller;
                cc.delta_alpha = da;
                cc.attitude_mode = mode;
                cc.epsilon = eps;
                std::ostringstream name;
                name << "sawei_da" << da << "_" << to_string(mode) << "_eps" << eps;
                cfg.schedules.push_back({name.str(), schedule::Sawei{}, cc});
                result.combos.push_back({name.str(), da, mode, eps, {}, {}, 0.0});
            }
        }
    }
    result.experiment = run_experiment(cfg);

    for (const auto& task : cfg.tasks) {
        std::vector<double> finals;
        std::vector<std::size_t> present;
        for (std::size_t c = 0; c < result.combos.size(); ++c) {
            for (const auto& curve : result.experiment.curves) {
                if (curve.task == task.name && curve.schedule == result.combos[c].name) {
                    result.combos[c].final_log10_regret[task.name] = curve.final_iqm_log10_regret;
                    finals.push_back(curve.final_iqm_log10_regret);
                    present.push_back(c);
                }
            }
        }
        const auto normalized = min_max_normalize(finals);
        for (std::size_t k = 0; k < present.size(); ++k) {
            result.combos[present[k]].normalized[task.name] = normalized[k];
        }
    }
    for (auto& combo : result.combos) {
        double sum = 0.0;
        for (const auto& [_, v] : combo.normalized) {
            sum += v;
        }
        combo.mean_normalized = combo.normalized.empty()
                                    ? std::numeric_limits<double>::quiet_NaN()
                                    : sum / static_cast<double>(combo.normalized.size());
    }

    const fs::path out = cfg.output_dir.empty() ? fs::path(".") : cfg.output_dir;
    std::ostringstream csv;
    csv << "combo,delta_alpha,attitude_mode,epsilon,task,final_iqm_log10_regret,normalized\n";
    json summary = json::array();
    for (const auto& combo : result.combos) {
        json per_task = json::object();
        for (const auto& task : cfg.tasks) {
            const auto f = combo.final_log10_regret.find(task.name);
            const auto n = combo.normalized.find(task.name);
            if (f == combo.final_log10_regret.end()) {
                continue;
            }
            csv << combo.name << ',' << format_csv(combo.delta_alpha) << ','
                << to_string(combo.attitude_mode) << ',' << format_csv(combo.epsilon) << ','
                << task.name << ',' << format_csv(f->second) << ',' << format_csv(n->second)
                << '\n';
            per_task[task.name] = {{"final_iqm_log10_regret", f->second},
                                   {"normalized", n->second}};
        }
        summary.push_back({{"combo", combo.name},
                           {"delta_alpha", combo.delta_alpha},
                           {"attitude_mode", to_string(combo.attitude_mode)},
                           {"epsilon", combo.epsilon},
                           {"tasks", per_task},
                           {"mean_normalized", combo.normalized.empty()
                                                   ? json(nullptr)
                                                   : json(combo.mean_normalized)}});
    }
    write_text_file(out / "sweep_summary.csv", csv.str());
    write_text_file(out / "sweep_summary.json", summary.dump(2) + "\n");
    return result;
}

}  // namespace sawei
