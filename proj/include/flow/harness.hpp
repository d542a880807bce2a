#pragma once

// Deterministic replay: input traces, trajectories, dual-path equivalence and
// frame-rate experiments.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flow/physics.hpp"
#include "flow/scene.hpp"
#include "flow/scene_file.hpp"

namespace flow::harness {

struct TraceRecord {
    std::int64_t step = 0;
    double h = 0.0;
    double v = 0.0;
    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Sparse per-step axis values; steps not listed read as (0, 0).
class InputTrace {
public:
    InputTrace() = default;
    /// Clamps values into [-1, 1]; throws std::invalid_argument on negative or
    /// non-increasing steps.
    explicit InputTrace(std::vector<TraceRecord> records);

    AxisSample at(std::int64_t step) const;
    const std::vector<TraceRecord>& records() const { return records_; }

private:
    std::vector<TraceRecord> records_;
};

class TraceFormatError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One `{"step":k,"h":x,"v":y}` object per line; blank lines ignored.
InputTrace parse_trace(std::string_view text);
InputTrace load_trace(const std::filesystem::path& file);
std::string format_trace(const InputTrace& trace);
std::string format_trace_record(const TraceRecord& r);

struct BallState {
    Vec3 position;
    Orientation orientation;
    Vec3 velocity;
    Vec3 angular_velocity;
};

struct CubeState {
    ActorId id;
    Vec3 position;
    Orientation orientation;
};

struct TrajectoryEvent {
    std::string kind;  // overlap | contact | removed
    ActorId actor;
    friend bool operator==(const TrajectoryEvent&, const TrajectoryEvent&) = default;
};

struct StepRecord {
    std::int64_t step = 0;
    double t = 0.0;
    std::optional<BallState> ball;
    std::vector<CubeState> cubes;  // active cubes only
    std::vector<ActorId> active_cubes;
    std::vector<TrajectoryEvent> events;
    bool won = false;
};

struct TrajectoryHeader {
    double fixed_dt = 0.02;
    std::string scene_hash;
    ScriptingMode mode = ScriptingMode::Graph;
};

struct Trajectory {
    TrajectoryHeader header;
    std::vector<StepRecord> steps;
    bool won() const { return !steps.empty() && steps.back().won; }
};

std::string header_json(const TrajectoryHeader& h);
std::string record_json(const StepRecord& r);
/// Header line followed by one line per step.
std::string to_jsonl(const Trajectory& t);

/// A graph fault surfaced by the run loop.
class RunFault : public std::runtime_error {
public:
    RunFault(std::int64_t step, RuntimeFault fault);
    std::int64_t step;
    RuntimeFault fault;
};

/// Frame loop locked 1:1 to the physics step.
class Simulation {
public:
    Simulation(LoadedScene loaded, ScriptingMode mode);

    /// One step: frame events, physics, overlap dispatch, deferred removals.
    /// Throws RunFault after completing the step if any graph faulted.
    StepRecord advance(AxisSample axes);

    bool won() const { return won_; }
    const Scene& scene() const { return scene_; }
    const physics::PhysicsConfig& physics() const { return physics_; }
    const behaviors::BehaviorParams& ball_params() const { return ball_params_; }
    TrajectoryHeader header() const;
    StepRecord snapshot() const;

private:
    Scene scene_;
    physics::PhysicsConfig physics_;
    behaviors::BehaviorParams ball_params_;
    std::string hash_;
    ScriptingMode mode_;
    bool won_ = false;
};

struct RunOptions {
    std::filesystem::path scene_file;
    ScriptingMode mode = ScriptingMode::Graph;
    InputTrace trace;
    std::int64_t steps = 0;
    std::optional<double> fixed_dt;
};

/// Stops early once every cube is gone.
Trajectory run(const RunOptions& options);
Trajectory run(LoadedScene loaded, ScriptingMode mode, const InputTrace& trace, std::int64_t steps);

struct Divergence {
    std::int64_t step = 0;
    std::string field;
    double a_value = 0.0;
    double b_value = 0.0;
    double abs_diff = 0.0;
};

struct RemovalStep {
    ActorId cube;
    std::int64_t step = 0;
    friend bool operator==(const RemovalStep&, const RemovalStep&) = default;
};

struct EquivalenceReport {
    bool equivalent = false;
    std::optional<Divergence> first_divergence;
    double max_abs_diff = 0.0;
    std::vector<RemovalStep> removal_steps_a;
    std::vector<RemovalStep> removal_steps_b;
    std::int64_t steps_a = 0;
    std::int64_t steps_b = 0;
    double tolerance = 0.0;
};

inline constexpr double kDefaultTolerance = 1e-12;

EquivalenceReport compare(const Trajectory& a, const Trajectory& b, double tolerance = kDefaultTolerance);

/// Runs graph mode and script mode concurrently and compares them.
/// Throws SceneValidationError when the scene is not paired.
EquivalenceReport check_equivalence(const std::filesystem::path& scene_file, const InputTrace& trace,
                                    std::int64_t steps, double tolerance = kDefaultTolerance,
                                    std::optional<double> fixed_dt = std::nullopt);

std::string report_json(const EquivalenceReport& r);

struct FramerateRow {
    double rate_hz = 0.0;
    std::int64_t frames = 0;
    Orientation final_orientation;
    double yaw_deg = 0.0;
    std::optional<double> deviation_deg;  // geodesic angle to the reference run
};

struct PairDifference {
    double rate_a = 0.0;
    double rate_b = 0.0;
    double angle_deg = 0.0;
};

struct FramerateTable {
    std::vector<FramerateRow> rows;
    std::vector<PairDifference> pairs;
    std::optional<FramerateRow> reference;
};

/// Spins a lone cube with RotatorBehavior at each frame rate for `duration` seconds.
/// Throws std::invalid_argument unless at least two positive rates and a positive duration.
FramerateTable framerate_experiment(std::span<const double> rates_hz, double duration_s,
                                    Rotator euler_rates, std::optional<double> reference_hz = std::nullopt);

/// Final orientation after spinning at `rate_hz` for `duration_s`.
Orientation spin(double rate_hz, double duration_s, Rotator euler_rates, std::int64_t* frames = nullptr);

std::string framerate_json(const FramerateTable& table);

/// Closed-loop steering toward the nearest remaining cube until every cube is gone.
/// The returned trace replays the same run in either scripting mode.
InputTrace plan_tour(LoadedScene loaded, ScriptingMode mode, std::int64_t max_steps,
                     double cruise_speed = 3.0);

}  // namespace flow::harness
