#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wavebem/bie.hpp"
#include "wavebem/oracle.hpp"

namespace wavebem::cli {

// Minimal TOML-style reader: [sections], key = value with numbers, strings,
// booleans and (nested) numeric arrays. Enough for scenario files; anything
// else is a validation error.
class KeyValueFile {
 public:
  static KeyValueFile parse_file(const std::string& path);
  static KeyValueFile parse_string(const std::string& text, const std::string& name = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;
  std::string str_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  bool flag_or(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& section, const std::string& key) const;
  std::vector<std::vector<double>> number_rows(const std::string& section,
                                               const std::string& key) const;
  const std::string& raw_text() const { return raw_; }

 private:
  struct Value {
    std::string text;
    int line = 0;
  };
  std::map<std::string, Value> values_;
  std::string raw_;
  std::string name_;
  const Value& lookup(const std::string& section, const std::string& key) const;
};

struct Scenario {
  int dim = 2;
  double c = 1.0;
  std::string bvp = "dirichlet";  // dirichlet | neumann | mixed-1d | none

  // geometry
  std::string geometry_kind = "circle";
  vec3 center{};
  double radius = 1.0;
  int elements = 64;
  int refinement = 2;
  double a1 = 0.0, a2 = 1.0;
  std::string mesh_file;

  quad::TimeGrid grid{1e-2, 100};
  bool cfl_override = false;

  // boundary data
  std::string oracle_name = "none";
  std::string profile_name = "ramp_sine";
  double profile_param = two_pi;
  double amplitude = 1.0;
  vec3 direction{1.0, 0.0, 0.0};
  double shift = 1.0;
  int mode = 1;
  std::string trace_file;

  // initial data
  std::string initial_kind = "zero";  // zero | oracle | bump
  vec3 bump_center{};
  double bump_width = 0.3;
  double u0_amp = 0.0;
  double v0_amp = 0.0;

  bool source_active = false;

  quad::QuadratureConfig quadr;
  bie::MarchConfig march;

  // outputs
  std::string out_trace = "trace.csv";
  std::string out_residual_log;
  std::string out_field;
  std::string out_summary;
  std::string out_manifest;
  std::vector<vec3> field_points;
  std::vector<double> field_times;

  std::uint64_t content_hash = 0;

  static Scenario load(const std::string& path);
  static Scenario from_kv(const KeyValueFile& kv);

  geom::BoundaryMesh build_mesh() const;
  std::optional<oracle::OracleSolution> build_oracle() const;
  InitialData build_initial(const oracle::OracleSolution* oracle) const;
};

struct RunArtifacts {
  int exit_code = 0;
  std::string message;
};

// Executes a scenario end to end: mesh, data, solve, evaluation, CSV
// artifacts and a run manifest; deterministic for a fixed scenario.
RunArtifacts run_scenario(const Scenario& sc, const std::string& out_dir);

// Formula coverage registry: every implemented integral identity or kernel
// family is listed here and must be claimed by at least one CLI subcommand.
const std::vector<std::string>& formula_registry();
const std::vector<std::pair<std::string, std::string>>& cli_formula_claims();

}  // namespace wavebem::cli
