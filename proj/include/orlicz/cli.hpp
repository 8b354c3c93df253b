#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "orlicz/geometry.hpp"
#include "orlicz/perron.hpp"
#include "orlicz/phi.hpp"
#include "orlicz/solver.hpp"

namespace orlicz::cli {

enum class Task { check_phi, solve, capacity, potential, wiener, perron };

const char* to_string(Task t);
std::optional<Task> parse_task(std::string_view name);

/// Closed-form boundary data: constant(c), linear(a, b, c) = a·x + b·y + c,
/// radial_levels(split, inner, outer), sin_theta(k), abs_x().
class DataFunction {
 public:
  static DataFunction parse(std::string_view name, std::vector<double> args);  // throws ConfigError
  double operator()(Point p) const;
  std::string spec() const;
  friend bool operator==(const DataFunction&, const DataFunction&) = default;

 private:
  std::string name_ = "constant";
  std::vector<double> args_{0.0};
};

struct Scenario {
  Task task = Task::check_phi;
  bool task_defaulted = true;  // no `task` key; the command line names it
  std::optional<PhiFunction> phi;
  std::optional<Domain> domain;
  std::optional<Box> box;
  std::optional<Point> x0;
  std::optional<Shape> K;
  std::optional<Shape> ambient;
  std::optional<Ball> restriction;
  double h = 1.0 / 64.0;
  bool h_defaulted = true;
  DataFunction data;
  std::optional<DataFunction> obstacle;
  ObstacleSide side = ObstacleSide::upper;
  SolveOptions solve;
  double rho = 0.25;             // wiener: largest scale
  int scales = 5;                // wiener: j_max
  int nodes_per_radius = 64;     // wiener / potential decay
  double r = 0.25;               // potential decay: outer radius
  std::vector<double> radii;     // check-phi: (A1) radii; potential: decay radii
  bool exterior_check = false;   // wiener: also run the exterior sphere check
  double perron_tol = 1e-9;
  int max_sweeps = 400;
  int samples = 1000;            // check-phi: random Young-inequality samples
  std::uint64_t seed = 0;
  std::string out = "out";
  std::vector<std::string> notes;  // defaults filled in and similar remarks

  // Canonical key → value pairs, in emission order; also the config round-trip form.
  std::vector<std::pair<std::string, std::string>> resolved() const;
};

bool operator==(const Scenario& a, const Scenario& b);

/// Parses the flat `key = value` format: one entry per line, `#` starts a
/// comment, values are numbers (with + − * / and parentheses) or calls such
/// as ball(0, 0, 1). Throws ConfigError carrying line/column for syntax
/// errors and the key as path for semantic ones.
Scenario parse_config(std::string_view text, const std::string& source = "<config>");
Scenario load_config(const std::filesystem::path& path);
std::string to_config(const Scenario& s);

// Checks that the keys the task needs are present; throws ConfigError naming the key.
void validate(const Scenario& s);

struct Artifact {
  std::string name;
  std::string content;
};

struct TaskOutput {
  nlohmann::ordered_json report;
  std::vector<Artifact> artifacts;  // report included as <task>.json
  bool converged = true;
};

TaskOutput run_task(const Scenario& s);

struct ManifestEntry {
  std::string name;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

std::string sha256_hex(std::string_view data);

/// Writes each artifact via temp file + rename, then manifest.json listing
/// their SHA-256 digests. Throws std::runtime_error naming the path on IO failure.
std::vector<ManifestEntry> emit_report(const std::vector<Artifact>& artifacts, const std::filesystem::path& out_dir);

// Exit codes: 0 success, 1 IO or internal failure, 2 configuration error, 3 non-convergence.
int run_command(int argc, char** argv);

}  // namespace orlicz::cli
