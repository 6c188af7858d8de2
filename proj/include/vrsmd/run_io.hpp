#pragma once

#include <json.hpp>
#include <string>

#include "vrsmd/core.hpp"
#include "vrsmd/solvers.hpp"

namespace vrsmd::run_io {

inline constexpr const char* kVersion = "0.1.0";

// Trace CSV schema: header "s,t,F,psi,dual_residual,inf_norm", doubles as
// %.17g so files round-trip bitwise.
void write_trace_csv(const solvers::SolverRun& run, const std::string& path);

void write_vector_csv(const Vector& v, const std::string& path);
Vector read_vector_csv(const std::string& path);

std::uint64_t hash_file(const std::string& path);
std::string hash_hex(std::uint64_t h);

nlohmann::json solver_config_json(const solvers::SolverConfig& cfg);

// Deterministic run metadata (config echo, B/K observed, status, warnings);
// wall time is written separately so this file reproduces bitwise.
nlohmann::json run_summary_json(const solvers::SolverConfig& cfg, const solvers::SolverRun& run);

void write_json(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json(const std::string& path);

}  // namespace vrsmd::run_io
