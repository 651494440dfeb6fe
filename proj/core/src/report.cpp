#include "sawei/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "sawei/errors.hpp"
#include "sawei/stats.hpp"
#include "sawei/svg.hpp"
#include "sawei/trace_io.hpp"

namespace sawei {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kSlopeWindow = 5;

struct RunEntry {
    std::string task;
    std::uint64_t instance;
    std::string schedule;
    std::uint64_t seed;
    fs::path trace;
    fs::path summary;
    bool ok;
};

double finite_mean(const std::vector<double>& v, std::size_t from, std::size_t to) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = from; i < to && i < v.size(); ++i) {
        if (std::isfinite(v[i])) {
            sum += v[i];
            ++n;
        }
    }
    return n == 0 ? kNan : sum / static_cast<double>(n);
}

double finite_iqm(std::vector<double> v) {
    std::erase_if(v, [](double x) { return !std::isfinite(x); });
    return v.empty() ? kNan : iqm(v);
}

// Mean first difference of v over [from, to).
double mean_slope(const std::vector<double>& v, std::size_t from, std::size_t to) {
    to = std::min(to, v.size());
    if (to <= from + 1) {
        return kNan;
    }
    return (v[to - 1] - v[from]) / static_cast<double>(to - 1 - from);
}

double log_ubr(double u) { return std::log10(std::max(u, 1e-12)); }

void emit(ReportOutput& out, const fs::path& path, const std::string& content) {
    write_text_file(path, content);
    out.files.push_back(path);
}

std::string csv(double v) { return format_double(v); }

}  // namespace

std::size_t switch_step(double fraction, std::size_t bo_budget) {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(bo_budget)));
}

ReportOutput emit_report(const fs::path& dir, bool plots) {
    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path)) {
        throw MissingManifest("no manifest.json in " + dir.string());
    }
    json manifest;
    try {
        manifest = json::parse(read_text_file(manifest_path));
    } catch (const json::parse_error& e) {
        throw ParseError(manifest_path.string() + ": " + e.what());
    }
    if (!manifest.contains("schedules") || manifest.at("schedules").empty()) {
        throw MissingManifest("manifest lists no schedules");
    }

    const auto init = manifest.at("init_size").get<std::size_t>();
    const auto steps = manifest.at("bo_budget").get<std::size_t>();
    const auto tasks = manifest.at("tasks").get<std::vector<std::string>>();
    const auto schedules = manifest.at("schedules").get<std::vector<std::string>>();

    // EI->PI switch fraction by schedule name, if any.
    std::map<std::string, double> switch_fraction;
    if (manifest.contains("config")) {
        for (const auto& s : manifest.at("config").at("schedules")) {
            const auto policy = parse_schedule(s.at("type").get<std::string>());
            if (const auto* sw = std::get_if<schedule::SwitchEiPi>(&policy)) {
                switch_fraction[s.at("name").get<std::string>()] = sw->fraction;
            }
        }
    }

    std::vector<AggregateCurve> curves;
    for (const auto& a : manifest.at("aggregates")) {
        curves.push_back(AggregateCurve::from_json(
            json::parse(read_text_file(dir / a.at("file").get<std::string>()))));
    }

    std::vector<RunEntry> runs;
    for (const auto& r : manifest.at("runs")) {
        runs.push_back({r.at("task").get<std::string>(), r.at("instance").get<std::uint64_t>(),
                        r.at("schedule").get<std::string>(), r.at("seed").get<std::uint64_t>(),
                        r.at("trace").get<std::string>(), r.at("summary").get<std::string>(),
                        r.at("status").get<std::string>() == "ok"});
    }

    ReportOutput out;
    out.ranks = ranks_per_step(curves);
    const RankReport& rk = out.ranks;
    const fs::path rdir = dir / "report";

    {
        std::ostringstream o;
        o << "step";
        for (const auto& s : rk.schedules) {
            o << ',' << s;
        }
        o << '\n';
        for (std::size_t step = 0; step < rk.steps; ++step) {
            o << step + 1;
            for (const double r : rk.mean_ranks[step]) {
                o << ',' << csv(r);
            }
            o << '\n';
        }
        emit(out, rdir / "ranks_per_step.csv", o.str());
    }
    {
        std::ostringstream o;
        o << "task,step,schedule,iqm_regret,rank\n";
        for (std::size_t t = 0; t < rk.tasks.size(); ++t) {
            for (std::size_t step = 0; step < rk.steps; ++step) {
                for (std::size_t s = 0; s < rk.schedules.size(); ++s) {
                    const auto it = std::find_if(curves.begin(), curves.end(), [&](const auto& c) {
                        return c.task == rk.tasks[t] && c.schedule == rk.schedules[s];
                    });
                    o << rk.tasks[t] << ',' << step + 1 << ',' << rk.schedules[s] << ','
                      << csv(it->iqm_regret[step]) << ',' << csv(rk.task_ranks[t][step][s]) << '\n';
                }
            }
        }
        emit(out, rdir / "task_ranks.csv", o.str());
    }
    {
        std::ostringstream o;
        o << "schedule,final_rank";
        for (const auto& t : rk.tasks) {
            o << ',' << t;
        }
        o << '\n';
        for (std::size_t s = 0; s < rk.schedules.size(); ++s) {
            o << rk.schedules[s] << ',' << csv(rk.final_ranks[s]);
            for (std::size_t t = 0; t < rk.tasks.size(); ++t) {
                o << ',' << csv(rk.task_ranks[t].back()[s]);
            }
            o << '\n';
        }
        emit(out, rdir / "final_ranks.csv", o.str());
    }
    {
        std::ostringstream o;
        o << "task,instance,schedule,seed,status,final_regret,final_log10_regret,adjust_events\n";
        for (const auto& r : runs) {
            double regret = kNan;
            double log_regret = kNan;
            std::size_t events = 0;
            if (r.ok) {
                const json s = json::parse(read_text_file(dir / r.summary));
                regret = s.at("final_regret").is_number() ? s.at("final_regret").get<double>() : kNan;
                log_regret = s.at("final_log10_regret").is_number()
                                 ? s.at("final_log10_regret").get<double>()
                                 : kNan;
                events = s.at("adjust_events").get<std::size_t>();
            }
            o << r.task << ',' << r.instance << ',' << r.schedule << ',' << r.seed << ','
              << (r.ok ? "ok" : "aborted") << ',' << csv(regret) << ',' << csv(log_regret) << ','
              << events << '\n';
        }
        emit(out, rdir / "final_regret_summary.csv", o.str());
    }

    // Per-run BO-phase series from the traces: alpha and log10 smoothed UBR.
    struct Series {
        std::vector<double> alpha;
        std::vector<double> log_ubr;
    };
    std::vector<Series> series(runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (!runs[i].ok) {
            continue;
        }
        const auto rows = read_trace_csv(dir / runs[i].trace);
        for (std::size_t k = init; k < rows.size(); ++k) {
            series[i].alpha.push_back(rows[k].alpha);
            series[i].log_ubr.push_back(log_ubr(rows[k].ubr_smoothed));
        }
    }

    const std::size_t half = steps / 2;
    {
        std::ostringstream o;
        o << "task,instance,schedule,seed,alpha_first_half,alpha_second_half,drift\n";
        for (std::size_t i = 0; i < runs.size(); ++i) {
            if (!runs[i].ok) {
                continue;
            }
            const double a = finite_mean(series[i].alpha, 0, half);
            const double b = finite_mean(series[i].alpha, half, steps);
            if (!std::isfinite(a) && !std::isfinite(b)) {
                continue;
            }
            o << runs[i].task << ',' << runs[i].instance << ',' << runs[i].schedule << ','
              << runs[i].seed << ',' << csv(a) << ',' << csv(b) << ',' << csv(b - a) << '\n';
        }
        emit(out, rdir / "alpha_drift.csv", o.str());
    }
    {
        std::ostringstream o;
        o << "task,instance,schedule,seed,switch_step,switch_iteration,log10_ubr_at_switch,"
             "slope_before,slope_after,bend\n";
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const auto sw = switch_fraction.find(runs[i].schedule);
            if (!runs[i].ok || sw == switch_fraction.end()) {
                continue;
            }
            const std::size_t k = switch_step(sw->second, steps);
            const auto& u = series[i].log_ubr;
            const double at = k > 0 && k <= u.size() ? u[k - 1] : kNan;
            const double before = mean_slope(u, k > kSlopeWindow ? k - kSlopeWindow : 0, k);
            const double after = mean_slope(u, k, k + kSlopeWindow);
            o << runs[i].task << ',' << runs[i].instance << ',' << runs[i].schedule << ','
              << runs[i].seed << ',' << k << ',' << init + k << ',' << csv(at) << ','
              << csv(before) << ',' << csv(after) << ',' << csv(after - before) << '\n';
        }
        emit(out, rdir / "ubr_switch_diagnostic.csv", o.str());
    }

    if (!plots) {
        return out;
    }

    {
        svg::LineChart chart{"Mean rank per step", "BO step", "rank", {}, {}};
        for (std::size_t s = 0; s < rk.schedules.size(); ++s) {
            svg::Series line{rk.schedules[s], {}};
            for (std::size_t step = 0; step < rk.steps; ++step) {
                line.y.push_back(rk.mean_ranks[step][s]);
            }
            chart.series.push_back(std::move(line));
        }
        emit(out, rdir / "ranks_per_step.svg", svg::render(chart));
    }

    for (const auto& task : tasks) {
        const std::string stem = sanitize_name(task);
        svg::LineChart regret{task + ": IQM log10 regret", "BO step", "log10 regret", {}, {}};
        for (const auto& c : curves) {
            if (c.task == task) {
                regret.series.push_back({c.schedule, c.iqm_log10_regret});
            }
        }
        emit(out, rdir / (stem + "_log_regret.svg"), svg::render(regret));

        svg::LineChart ubr{task + ": IQM log10 smoothed UBR", "BO step", "log10 UBR", {}, {}};
        svg::LineChart alpha{task + ": mean alpha", "BO step", "alpha", {}, {}};
        for (const auto& sched : schedules) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < runs.size(); ++i) {
                if (runs[i].ok && runs[i].task == task && runs[i].schedule == sched) {
                    members.push_back(i);
                }
            }
            if (members.empty()) {
                continue;
            }
            svg::Series u{sched, {}};
            svg::Series a{sched, {}};
            bool any_alpha = false;
            for (std::size_t step = 0; step < steps; ++step) {
                std::vector<double> us;
                std::vector<double> as;
                for (const auto m : members) {
                    if (step < series[m].log_ubr.size()) {
                        us.push_back(series[m].log_ubr[step]);
                        as.push_back(series[m].alpha[step]);
                    }
                }
                u.y.push_back(finite_iqm(us));
                const double mean_alpha = finite_mean(as, 0, as.size());
                any_alpha = any_alpha || std::isfinite(mean_alpha);
                a.y.push_back(mean_alpha);
            }
            ubr.series.push_back(std::move(u));
            if (any_alpha) {
                alpha.series.push_back(std::move(a));
            }
            if (const auto sw = switch_fraction.find(sched); sw != switch_fraction.end()) {
                const double x = static_cast<double>(switch_step(sw->second, steps) + 1);
                ubr.markers.push_back({x, "switch " + sched});
            }
        }
        emit(out, rdir / (stem + "_ubr.svg"), svg::render(ubr));
        emit(out, rdir / (stem + "_alpha.svg"), svg::render(alpha));
    }
    return out;
}

}  // namespace sawei
