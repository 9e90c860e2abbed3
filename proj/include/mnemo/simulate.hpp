#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mnemo/deck.hpp"
#include "mnemo/study.hpp"

namespace mnemo {

struct SimulationOptions {
  std::size_t participants = 8;
  std::uint64_t seed = 1;
  std::filesystem::path sessions_dir = "sessions";
  bool durable_logs = true;     // fsync every log append
  bool verify_replay = true;    // replay each log and compare with the live session
  double early_advance_rate = 0.1;
  double near_limit_rate = 0.05;
  double timeout_rate = 0.05;
};

/// Counters collected while driving simulated participants through the
/// service. A "violation" is anything the protocol forbids.
struct SimulationReport {
  std::size_t sessions = 0;
  std::size_t completed = 0;
  std::size_t early_attempts = 0;
  std::size_t early_rejected = 0;
  std::size_t timeouts = 0;
  std::size_t near_limit = 0;
  std::size_t hidden_cue_leaks = 0;    // a cue the condition or phase must hide was sent
  std::size_t coverage_errors = 0;     // a word not seen exactly once per phase kind
  std::size_t replay_mismatches = 0;
  std::vector<std::string> messages;   // first few violations, for diagnostics
  std::vector<StudySession> final_sessions;

  bool ok() const {
    return completed == sessions && early_rejected == early_attempts && hidden_cue_leaks == 0 &&
           coverage_errors == 0 && replay_mismatches == 0;
  }
};

// Deterministic for a given deck and options: each participant draws its
// behaviour from its own seeded generator and time comes from a virtual
// clock.
SimulationReport simulate_participants(const Deck& deck, const SimulationOptions& options);

}  // namespace mnemo
