#include "flow/cli.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>

#include "flow/graphlang.hpp"
#include "flow/harness.hpp"
#include "flow/scene_file.hpp"
#include "flow/server.hpp"

#ifndef FLOW_WEB_DIR
#define FLOW_WEB_DIR ""
#endif

namespace flow::cli {

namespace {

struct Common {
    std::string scene;
    std::string mode = "graph";
    std::string trace;
    std::int64_t steps = 0;
    std::optional<double> fixed_dt;
};

ScriptingMode mode_of(const std::string& s) { return *parse_mode(s); }

harness::InputTrace trace_of(const std::string& path) {
    return path.empty() ? harness::InputTrace{} : harness::load_trace(path);
}

/// Writes to `path`, or to `out` when the path is empty or "-".
bool emit(const std::string& path, const std::string& text, std::ostream& out, std::ostream& err) {
    if (path.empty() || path == "-") {
        out << text;
        return true;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!(f << text)) {
        err << "error: cannot write '" << path << "'\n";
        return false;
    }
    return true;
}

void report(const SceneValidationError& e, std::ostream& err) {
    for (const auto& d : e.diagnostics) err << d.format() << '\n';
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t comma = s.find(',', pos);
        const std::string item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

int serve_until_signalled(service::ServeOptions opts, std::ostream& err) {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);  // inherited by server threads

    service::Server server(std::move(opts));
    err << "serving on port " << server.port() << '\n';
    std::thread runner([&] { server.run(); });
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
    runner.join();
    return kExitOk;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Deterministic game-logic engine with node-graph and native scripting paths", "flow"};
    app.require_subcommand(1);
    const std::vector<std::string> modes{"graph", "script"};

    Common c;
    std::string out_path;
    auto add_common = [&](CLI::App* sub, bool with_mode) {
        sub->add_option("--scene", c.scene, "scene file (scene/1 JSON)")->required()->check(CLI::ExistingFile);
        if (with_mode) sub->add_option("--mode", c.mode, "scripting path")->check(CLI::IsMember(modes));
        sub->add_option("--fixed-dt", c.fixed_dt, "override the scene's physics step (s)")
            ->check(CLI::PositiveNumber);
    };

    auto* run = app.add_subcommand("run", "replay an input trace and write the trajectory");
    add_common(run, true);
    run->add_option("--trace", c.trace, "input trace (JSONL); omitted means no input");
    run->add_option("--steps", c.steps, "number of steps")->required()->check(CLI::PositiveNumber);
    run->add_option("--out", out_path, "trajectory file (default: standard output)");

    double tolerance = harness::kDefaultTolerance;
    auto* check = app.add_subcommand("check", "run graph and script paths and compare trajectories");
    add_common(check, false);
    check->add_option("--trace", c.trace, "input trace (JSONL)");
    check->add_option("--steps", c.steps, "number of steps")->required()->check(CLI::PositiveNumber);
    check->add_option("--tolerance", tolerance, "absolute per-component tolerance")
        ->check(CLI::NonNegativeNumber);
    check->add_option("--out", out_path, "report file (default: standard output)");

    std::string graph_file;
    std::string emit_format = "none";
    auto* validate = app.add_subcommand("validate", "parse and validate a .fg graph");
    validate->add_option("file", graph_file, "graph source")->required();
    validate->add_option("--emit", emit_format, "print the graph when clean: json (fgjson/1) or fg (canonical)")
        ->check(CLI::IsMember({"none", "json", "fg"}));

    service::ServeOptions serve_opts;
    serve_opts.port = service::default_port();
    serve_opts.assets_dir = FLOW_WEB_DIR;
    std::string record;
    auto* serve = app.add_subcommand("serve", "live play sessions over websocket on /session");
    add_common(serve, true);
    serve->add_option("--port", serve_opts.port, "listen port (default: $FLOW_PORT or 8080)");
    serve->add_option("--address", serve_opts.address, "listen address");
    serve->add_option("--tick-hz", serve_opts.tick_hz, "steps per wall-clock second")->check(CLI::PositiveNumber);
    serve->add_option("--assets", serve_opts.assets_dir, "static client directory served on /");
    serve->add_option("--record", record, "record held inputs as a replayable trace");

    std::string rates = "30,60,120";
    std::string euler = "15,30,45";
    double duration = 10.0;
    std::optional<double> reference;
    auto* framerate = app.add_subcommand("framerate", "spin a cube at several frame rates and compare");
    framerate->add_option("--rates", rates, "comma-separated frame rates (Hz)");
    framerate->add_option("--euler", euler, "roll,pitch,yaw rates (deg/s)");
    framerate->add_option("--duration", duration, "seconds")->check(CLI::PositiveNumber);
    framerate->add_option("--reference", reference, "reference rate (Hz) for deviations")
        ->check(CLI::PositiveNumber);

    double cruise = 3.0;
    auto* tour = app.add_subcommand("tour", "plan a trace that collects every cube");
    add_common(tour, true);
    tour->add_option("--steps", c.steps, "step budget")->required()->check(CLI::PositiveNumber);
    tour->add_option("--cruise", cruise, "target speed (m/s)")->check(CLI::PositiveNumber);
    tour->add_option("--out", out_path, "trace file (default: standard output)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitFailure;
    }

    try {
        if (*run) {
            const auto traj = harness::run({c.scene, mode_of(c.mode), trace_of(c.trace), c.steps, c.fixed_dt});
            return emit(out_path, harness::to_jsonl(traj), out, err) ? kExitOk : kExitFailure;
        }
        if (*check) {
            const auto rep = harness::check_equivalence(c.scene, trace_of(c.trace), c.steps, tolerance, c.fixed_dt);
            if (!emit(out_path, harness::report_json(rep) + '\n', out, err)) return kExitFailure;
            return rep.equivalent ? kExitOk : kExitFailure;
        }
        if (*validate) {
            std::string source;
            try {
                source = read_file(graph_file);
            } catch (const std::exception& e) {
                err << "error: " << e.what() << '\n';
                return kExitFailure;
            }
            const auto diags = check_graph_source(source, graph_file);
            for (const auto& d : diags) err << d.format() << '\n';
            if (!diags.empty()) return kExitInvalid;
            const auto g = graphlang::parse(source).graph;
            if (emit_format == "json") out << graphlang::to_json(g) << '\n';
            if (emit_format == "fg") out << graphlang::serialize(g);
            return kExitOk;
        }
        if (*serve) {
            serve_opts.scene_file = c.scene;
            serve_opts.mode = mode_of(c.mode);
            if (!record.empty()) serve_opts.record_file = record;
            return serve_until_signalled(std::move(serve_opts), err);
        }
        if (*framerate) {
            const auto r = parse_list(rates);
            const auto e = parse_list(euler);
            if (e.size() != 3) throw std::invalid_argument("--euler needs three values");
            const auto table = harness::framerate_experiment(r, duration, Rotator{e[0], e[1], e[2]}, reference);
            out << harness::framerate_json(table) << '\n';
            return kExitOk;
        }
        if (*tour) {
            const auto mode = mode_of(c.mode);
            const auto trace = harness::plan_tour(load_scene(c.scene, mode, c.fixed_dt), mode, c.steps, cruise);
            const auto traj = harness::run(load_scene(c.scene, mode, c.fixed_dt), mode, trace, c.steps);
            err << "tour: " << traj.steps.size() << " steps, "
                << (traj.won() ? "all cubes collected" : "cubes remain") << '\n';
            if (!emit(out_path, harness::format_trace(trace), out, err)) return kExitFailure;
            return traj.won() ? kExitOk : kExitFailure;
        }
    } catch (const SceneValidationError& e) {
        report(e, err);
        return kExitInvalid;
    } catch (const harness::TraceFormatError& e) {
        err << "error[TraceFormat]: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const harness::RunFault& e) {
        err << "error[RuntimeFault]: " << e.what() << '\n';
        return kExitRuntimeFault;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace flow::cli
