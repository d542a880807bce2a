#pragma once

// Shared helpers for the test executables.

#include <filesystem>
#include <string>

#include <unistd.h>

#include "flow/graphlang.hpp"
#include "flow/scene_file.hpp"

namespace flow::testing {

inline std::filesystem::path source_dir() { return FLOW_SOURCE_DIR; }
inline std::filesystem::path data_dir() { return source_dir() / "data"; }
inline std::filesystem::path scene_path(const std::string& name) { return data_dir() / "scenes" / name; }
inline std::filesystem::path graph_path(const std::string& name) { return data_dir() / "graphs" / name; }
inline std::filesystem::path trace_path(const std::string& name) { return data_dir() / "traces" / name; }

/// Parses source that is expected to be clean.
inline graph::Graph parse_ok(std::string_view source) {
    auto r = graphlang::parse(source);
    if (!r.ok()) {
        std::string msg = "unexpected parse failure:";
        for (const auto& d : r.diagnostics) msg += "\n  " + d.code + ": " + d.message;
        throw std::runtime_error(msg);
    }
    return std::move(r.graph);
}

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("flow-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(++counter));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace flow::testing
