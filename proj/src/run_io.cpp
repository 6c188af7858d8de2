#include "vrsmd/run_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "vrsmd/rng.hpp"

namespace vrsmd::run_io {

namespace {

void write_double(std::FILE* f, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::fputs(buf, f);
}

}  // namespace

void write_trace_csv(const solvers::SolverRun& run, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write trace file: " + path);
  std::fputs("s,t,F,psi,dual_residual,inf_norm\n", f);
  for (const auto& rec : run.trace) {
    std::fprintf(f, "%d,%d,", rec.outer, rec.inner);
    write_double(f, rec.objective);
    std::fputc(',', f);
    write_double(f, rec.psi_value);
    std::fputc(',', f);
    write_double(f, rec.dual_residual);
    std::fputc(',', f);
    write_double(f, rec.inf_norm);
    std::fputc('\n', f);
  }
  std::fclose(f);
}

void write_vector_csv(const Vector& v, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write vector file: " + path);
  for (Index i = 0; i < v.size(); ++i) {
    write_double(f, v(i));
    std::fputc('\n', f);
  }
  std::fclose(f);
}

Vector read_vector_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vector file: " + path);
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    vals.push_back(std::stod(line));
  }
  Vector v(static_cast<Index>(vals.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = vals[static_cast<std::size_t>(i)];
  return v;
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash missing file: " + path);
  std::uint64_t h = fnv1a64("", 0);
  char buf[65536];
  while (in) {
    in.read(buf, sizeof(buf));
    h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json solver_config_json(const solvers::SolverConfig& cfg) {
  nlohmann::json j;
  j["eta"] = cfg.eta;
  j["inner_m"] = cfg.inner_m;
  j["outer_s"] = cfg.outer_s;
  j["option"] = cfg.option == solvers::OptionVariant::option_i ? 1 : 2;
  j["seed"] = cfg.seed;
  j["record_every"] = cfg.record_every;
  if (cfg.init_dual_coeff.size() != 0) {
    std::vector<double> a(cfg.init_dual_coeff.data(),
                          cfg.init_dual_coeff.data() + cfg.init_dual_coeff.size());
    j["init_dual_coeff"] = a;
  }
  return j;
}

nlohmann::json run_summary_json(const solvers::SolverConfig& cfg, const solvers::SolverRun& run) {
  nlohmann::json j;
  j["config"] = solver_config_json(cfg);
  j["b_observed"] = run.b_observed;
  j["k_observed"] = run.k_observed;
  j["status"] = run.status == solvers::RunStatus::ok
                    ? "ok"
                    : (run.status == solvers::RunStatus::aborted_non_finite ? "aborted_non_finite"
                                                                            : "domain_violation");
  j["message"] = run.message;
  j["warnings"] = run.warnings;
  j["rng_transcript_hash"] = hash_hex(run.rng_transcript_hash);
  j["trace_records"] = run.trace.size();
  return j;
}

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write JSON file: " + path);
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open JSON file: " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace vrsmd::run_io
