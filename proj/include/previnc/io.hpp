#ifndef PREVINC_IO_HPP
#define PREVINC_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "previnc/cohort.hpp"
#include "previnc/simulate.hpp"

namespace previnc {

/// Record CSV schema: header `bwd,fwd_obs,event,age_cat`, durations as
/// decimal years, event in {0,1}, age_cat blank when absent. Parse
/// failures throw ParseError naming the line and field.
std::vector<PrevalentRecord> read_records_csv(const std::string& path);
void write_records_csv(const std::string& path, const std::vector<PrevalentRecord>& records);

/// Age-distribution CSV: header `segment_start,segment_end,<cat>,...`
/// with one row per calendar segment and one probability column per
/// category. Category names come from the header.
AgeDistribution read_age_csv(const std::string& path);

enum class SimMode { window, equilibrium };
const char* sim_mode_name(SimMode mode);

struct SimRun {
  SimMode mode = SimMode::equilibrium;
  SimConfig config;
};

/// Simulation configuration, JSON. See the README for the schema.
SimRun read_sim_config(const std::string& path);

/// Same schema, from an in-memory JSON string.
SimRun parse_sim_run(const std::string& json_text);

/// FNV-1a 64-bit over the raw bytes of the given files, in order.
/// Stable fingerprint for "did the inputs change" checks.
std::string files_digest(const std::vector<std::string>& paths);

}  // namespace previnc

#endif  // PREVINC_IO_HPP
