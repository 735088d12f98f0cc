#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fraclab/field.hpp"

namespace fraclab {

/// One stored time slice. `velocity` is set for wave runs.
struct Snapshot {
  double t;
  Field u;
  std::optional<Field> velocity;
};

/// Per-step monitored quantities. Fields that do not apply are NaN or 0.
struct StepRecord {
  long step = 0;
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double hgamma = 0.0;
  double high_band_fraction = 0.0;
  int picard_iterations = 0;
  double contraction = 0.0;
};

enum class RunStatus {
  Completed,
  NonFinite,        // a sample went NaN/Inf ("blowup-suspected")
  CeilingExceeded,  // H^gamma norm passed the configured ceiling
  NoContraction,
};

std::string status_name(RunStatus s);

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<StepRecord> records;
  RunStatus status = RunStatus::Completed;
  double status_time = 0.0;
  std::string message;
  /// Largest high-band mass fraction seen; compared against the aliasing alarm.
  double max_high_band_fraction = 0.0;
  bool aliasing_alarm = false;
};

}  // namespace fraclab
