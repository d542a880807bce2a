#pragma once

// Loading of scene files (JSON, format "scene/1") into a runnable Scene.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flow/behaviors.hpp"
#include "flow/physics.hpp"
#include "flow/scene.hpp"
#include "flow/source_span.hpp"

namespace flow {

enum class ScriptingMode { Graph, Script };

std::string_view to_string(ScriptingMode mode);
std::optional<ScriptingMode> parse_mode(std::string_view text);

/// A located problem in a scene file or one of the graphs it references.
struct FileDiagnostic {
    std::string file;
    std::string code;
    std::string message;
    std::optional<SourceSpan> span;

    std::string format() const;
};

/// Scene or graph content that cannot be run. Maps to exit code 2 in the CLI.
class SceneValidationError : public std::runtime_error {
public:
    explicit SceneValidationError(std::vector<FileDiagnostic> diagnostics);
    std::vector<FileDiagnostic> diagnostics;
};

struct LoadedScene {
    Scene scene;
    physics::PhysicsConfig physics;
    behaviors::BehaviorParams ball_params;
    std::string hash;  // 16 hex digits over the scene document and referenced graphs
    bool paired = true;  // every scripted actor declares both a graph and a script
};

LoadedScene load_scene(const std::filesystem::path& file, ScriptingMode mode,
                       std::optional<double> fixed_dt_override = std::nullopt);

/// `base_dir` resolves relative graph paths.
LoadedScene load_scene_text(std::string_view json_text, const std::filesystem::path& base_dir,
                            ScriptingMode mode, std::optional<double> fixed_dt_override = std::nullopt,
                            std::string_view display_name = "<scene>");

/// Parses and validates one .fg file; returns diagnostics (empty when clean).
std::vector<FileDiagnostic> check_graph_source(std::string_view source, std::string_view display_name);

std::string read_file(const std::filesystem::path& file);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace flow
