#pragma once

// One live play session speaking the flow/1 protocol. Transport-agnostic: the
// server feeds it inbound text frames and pacer ticks and ships whatever it returns.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flow/harness.hpp"
#include "flow/scene_file.hpp"

namespace flow::service {

inline constexpr std::string_view kProtocol = "flow/1";
inline constexpr int kMaxMalformedFrames = 10;

struct SessionConfig {
    std::filesystem::path scene_file;
    ScriptingMode mode = ScriptingMode::Graph;
    /// Held inputs are appended here (sparse trace lines) as each step runs.
    std::optional<std::filesystem::path> record_file;
};

class Session {
public:
    /// Loads the scene eagerly so configuration errors surface before any client speaks.
    explicit Session(SessionConfig config);

    /// Handles one inbound text frame; returns the frames to send back, in order.
    std::vector<std::string> on_message(std::string_view frame, bool text = true);

    /// One pacer tick. Advances the simulation by one fixed step and returns the state
    /// frame, or nothing before hello, after a win or fault, or once the session is closing.
    /// A graph fault yields one error frame instead.
    std::optional<std::string> tick();

    bool greeted() const { return greeted_; }
    bool should_close() const { return malformed_ >= kMaxMalformedFrames; }
    int malformed_count() const { return malformed_; }
    AxisSample held_input() const { return held_; }
    ScriptingMode mode() const { return config_.mode; }
    const harness::Simulation& simulation() const { return *sim_; }
    /// Non-zero inputs applied since the last (re)start, keyed by step index.
    const std::vector<harness::TraceRecord>& recorded() const { return recorded_; }

    std::string welcome_frame() const;

private:
    void rebuild();
    std::string error(std::string_view code, std::string_view message);
    std::string malformed(std::string_view message);

    SessionConfig config_;
    std::unique_ptr<harness::Simulation> sim_;
    std::optional<std::ofstream> record_out_;
    std::vector<harness::TraceRecord> recorded_;
    AxisSample held_;
    bool greeted_ = false;
    bool faulted_ = false;  // a graph fault halts stepping until restart
    int malformed_ = 0;
};

/// Serializes a state frame for a step record.
std::string state_frame(const harness::StepRecord& record, const Scene& scene);

}  // namespace flow::service
