#pragma once

#include "splatsim/scene_io.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace splatsim {

/// Stage failure; `frame` is -1 for stages that precede the first frame.
class PipelineError : public std::runtime_error {
public:
    PipelineError(std::string stage_name, int frame_index, const std::string& what)
        : std::runtime_error("stage '" + stage_name + "'" +
                             (frame_index >= 0 ? " frame " + std::to_string(frame_index) : std::string()) +
                             ": " + what),
          stage(std::move(stage_name)), frame(frame_index) {}
    std::string stage;
    int frame;
};

struct PipelineOptions {
    int threads = 0;
    std::uint64_t seed = 0;
    bool verbose = false;
};

struct PipelineResult {
    std::vector<FrameDiagnostics> frames;
    std::vector<std::filesystem::path> artifacts;
    Json manifest;
};

Json diagnostics_to_json(const FrameDiagnostics& d);

/// Runs an already-loaded scene and scenario, writing frames and
/// manifest.json under `out_dir`.
PipelineResult run_pipeline(const Scene& scene, const Scenario& scenario, const std::filesystem::path& out_dir,
                            const PipelineOptions& options, const Json& inputs = Json::object());

/// Loads both files and records their hashes in the manifest.
PipelineResult run_pipeline(const std::filesystem::path& scene_path, const std::filesystem::path& scenario_path,
                            const std::filesystem::path& out_dir, const PipelineOptions& options);

/// Manifest without the "runtime" section, for run-to-run comparison.
Json comparable_manifest(const Json& manifest);

} // namespace splatsim
