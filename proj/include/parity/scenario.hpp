#pragma once

// Line-oriented scenario scripts: one dated engine command per line, run
// against a fresh engine, with a deterministic text report of every cycle.
// The grammar is documented in docs/scenario-grammar.md.

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "parity/engine.hpp"

namespace parity {

struct ScenarioStep {
    std::size_t line = 0;  // 1-based source line
    Command command;
};

/// Throws Script errors naming the offending line. `base_dir` resolves
/// relative paths in `ingest` lines.
std::vector<ScenarioStep> parse_scenario(std::istream& in, const std::filesystem::path& base_dir = {});
std::vector<ScenarioStep> load_scenario(const std::filesystem::path& path);

struct ScenarioRun {
    std::unique_ptr<Engine> engine;
    std::vector<ScenarioStep> steps;
};

/// Applies every step in order; the first failing step raises a Script error
/// carrying its line number and the underlying message.
ScenarioRun run_scenario(const std::vector<ScenarioStep>& steps, const EngineConfig& config);

/// Cycle-by-cycle tables followed by final balances. Empty when no command
/// has been applied.
std::string text_report(const Engine& engine);
Json json_report(const Engine& engine);

}  // namespace parity
