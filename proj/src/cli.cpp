#include "orlicz/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "orlicz/capacity.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/format.hpp"
#include "orlicz/potential.hpp"
#include "orlicz/wiener.hpp"

namespace orlicz::cli {

using nlohmann::ordered_json;

const char* to_string(Task t) {
  switch (t) {
    case Task::check_phi:
      return "check-phi";
    case Task::solve:
      return "solve";
    case Task::capacity:
      return "capacity";
    case Task::potential:
      return "potential";
    case Task::wiener:
      return "wiener";
    case Task::perron:
      return "perron";
  }
  return "?";
}

std::optional<Task> parse_task(std::string_view name) {
  for (Task t : {Task::check_phi, Task::solve, Task::capacity, Task::potential, Task::wiener, Task::perron})
    if (name == to_string(t)) return t;
  return std::nullopt;
}

// --- boundary data ----------------------------------------------------------

DataFunction DataFunction::parse(std::string_view name, std::vector<double> args) {
  static const std::map<std::string, std::size_t, std::less<>> arity{
      {"constant", 1}, {"linear", 3}, {"radial_levels", 3}, {"sin_theta", 1}, {"abs_x", 0}};
  const auto it = arity.find(name);
  if (it == arity.end()) throw ConfigError("unknown data function '" + std::string(name) + "'");
  if (args.size() != it->second)
    throw ConfigError(std::string(name) + " takes " + std::to_string(it->second) + " arguments");
  DataFunction f;
  f.name_ = std::string(name);
  f.args_ = std::move(args);
  return f;
}

double DataFunction::operator()(Point p) const {
  if (name_ == "constant") return args_[0];
  if (name_ == "linear") return args_[0] * p.x + args_[1] * p.y + args_[2];
  if (name_ == "radial_levels") return norm(p) < args_[0] ? args_[1] : args_[2];
  if (name_ == "sin_theta") return std::sin(args_[0] * std::atan2(p.y, p.x));
  return std::abs(p.x);
}

std::string DataFunction::spec() const {
  std::string s = name_ + "(";
  for (std::size_t i = 0; i < args_.size(); ++i) s += (i ? ", " : "") + format_number(args_[i]);
  return s + ")";
}

// --- config syntax ----------------------------------------------------------

namespace {

struct Expr {
  bool is_call = false;
  double value = 0.0;
  std::string name;
  std::vector<Expr> args;
  int line = 0;
  int column = 0;
};

struct Entry {
  std::string raw;
  Expr expr;
  bool parsed = false;
  int line = 0;
  int column = 0;
};

class ExprParser {
 public:
  ExprParser(std::string_view text, std::string key, int line, int column0)
      : s_(text), key_(std::move(key)), line_(line), col0_(column0) {}

  Expr parse() {
    Expr e = sum();
    skip_ws();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(what, key_, line_, col0_ + static_cast<int>(pos_));
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  Expr make_number(double v, std::size_t at) const {
    Expr e;
    e.value = v;
    e.line = line_;
    e.column = col0_ + static_cast<int>(at);
    return e;
  }
  void need_number(const Expr& e) const {
    if (e.is_call) throw ConfigError("arithmetic needs numbers, got " + e.name, key_, e.line, e.column);
  }

  Expr sum() {
    Expr lhs = product();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (eat('+') || eat('-')) {
        const char op = s_[at];
        Expr rhs = product();
        need_number(lhs);
        need_number(rhs);
        lhs = make_number(op == '+' ? lhs.value + rhs.value : lhs.value - rhs.value, at);
      } else {
        return lhs;
      }
    }
  }
  Expr product() {
    Expr lhs = unary();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (eat('*') || eat('/')) {
        const char op = s_[at];
        Expr rhs = unary();
        need_number(lhs);
        need_number(rhs);
        if (op == '/' && rhs.value == 0.0) {
          pos_ = at;
          fail("division by zero");
        }
        lhs = make_number(op == '*' ? lhs.value * rhs.value : lhs.value / rhs.value, at);
      } else {
        return lhs;
      }
    }
  }
  Expr unary() {
    skip_ws();
    const std::size_t at = pos_;
    if (eat('-')) {
      Expr e = unary();
      need_number(e);
      return make_number(-e.value, at);
    }
    if (eat('+')) return unary();
    return primary();
  }
  Expr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("expected a value");
    const std::size_t at = pos_;
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
      if (res.ec != std::errc()) fail("malformed number");
      pos_ = static_cast<std::size_t>(res.ptr - s_.data());
      return make_number(v, at);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      Expr e;
      e.is_call = true;
      e.name = std::string(s_.substr(at, pos_ - at));
      e.line = line_;
      e.column = col0_ + static_cast<int>(at);
      if (e.name == "inf") return make_number(std::numeric_limits<double>::infinity(), at);
      if (e.name == "pi") return make_number(std::numbers::pi, at);
      if (eat('(')) {
        if (!eat(')')) {
          do {
            e.args.push_back(sum());
          } while (eat(','));
          if (!eat(')')) fail("expected ',' or ')'");
        }
      }
      return e;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::string key_;
  int line_;
  int col0_;
};

// --- interpretation ---------------------------------------------------------

[[noreturn]] void bad(const Expr& e, const std::string& key, const std::string& what) {
  throw ConfigError(what, key, e.line, e.column);
}

double number(const Expr& e, const std::string& key) {
  if (e.is_call) bad(e, key, "expected a number, got " + e.name);
  return e.value;
}

std::vector<double> numbers(const Expr& call, const std::string& key, std::size_t count, std::size_t least = 0) {
  if (least == 0) least = count;
  if (call.args.size() < least || call.args.size() > count)
    bad(call, key, call.name + " takes " + (least == count ? "" : std::to_string(least) + " to ") +
                       std::to_string(count) + " arguments");
  std::vector<double> out;
  for (const auto& a : call.args) out.push_back(number(a, key));
  return out;
}

CoefficientField coefficient(const Expr& e, const std::string& key) {
  if (!e.is_call) return CoefficientField::constant(e.value);
  if (e.name == "const") return CoefficientField::constant(numbers(e, key, 1)[0]);
  if (e.name == "step") {
    auto v = numbers(e, key, 4, 3);
    v.resize(4, 0.0);
    return CoefficientField::step(v[0], v[1], v[2], v[3]);
  }
  if (e.name == "pos_power") {
    auto v = numbers(e, key, 3, 1);
    if (v.size() == 1) v.push_back(1.0);
    v.resize(3, 0.0);
    return CoefficientField::positive_power(v[0], v[1], v[2]);
  }
  bad(e, key, "unknown coefficient '" + e.name + "' (const, step, pos_power)");
}

PhiFunction phi_of(const Expr& e, const std::string& key) {
  if (!e.is_call) bad(e, key, "expected a Phi-function");
  if (e.name == "power") return PhiFunction::power(numbers(e, key, 1)[0]);
  if (e.name == "orlicz_log") return PhiFunction::orlicz_log(numbers(e, key, 1)[0]);
  if (e.name == "variable_exponent" || e.name == "power_log") {
    if (e.args.size() != 1) bad(e, key, e.name + " takes 1 argument");
    const auto p = coefficient(e.args[0], key);
    return e.name == "power_log" ? PhiFunction::power_log(p) : PhiFunction::variable_exponent(p);
  }
  if (e.name == "double_phase") {
    if (e.args.size() != 3) bad(e, key, "double_phase takes 3 arguments");
    return PhiFunction::double_phase(number(e.args[0], key), number(e.args[1], key), coefficient(e.args[2], key));
  }
  bad(e, key, "unknown Phi-function '" + e.name + "'");
}

Shape shape_of(const Expr& e, const std::string& key) {
  if (!e.is_call) bad(e, key, "expected a shape");
  if (e.name == "ball") {
    const auto v = numbers(e, key, 3);
    return Shape::ball({v[0], v[1]}, v[2]);
  }
  if (e.name == "rect") {
    const auto v = numbers(e, key, 4);
    return Shape::rect({v[0], v[1], v[2], v[3]});
  }
  if (e.name == "halfplane") {
    const auto v = numbers(e, key, 3);
    return Shape::half_plane({v[0], v[1]}, v[2]);
  }
  if (e.name == "complement") {
    if (e.args.size() != 1) bad(e, key, "complement takes 1 argument");
    return shape_of(e.args[0], key).complement();
  }
  if (e.name == "union" || e.name == "intersect") {
    std::vector<Shape> parts;
    for (const auto& a : e.args) parts.push_back(shape_of(a, key));
    if (parts.empty()) bad(e, key, e.name + " needs at least one shape");
    return e.name == "union" ? Shape::unite(std::move(parts)) : Shape::intersect(std::move(parts));
  }
  bad(e, key, "unknown shape '" + e.name + "'");
}

Domain domain_of(const Expr& e, const std::string& key, std::optional<Box> box) {
  if (!e.is_call || e.name != "minus") return Domain(shape_of(e, key), box);
  if (e.args.empty()) bad(e, key, "minus needs an area");
  Shape area = shape_of(e.args[0], key);
  std::vector<Shape> cut;
  std::vector<Slit> slits;
  std::vector<Point> punctures;
  for (std::size_t i = 1; i < e.args.size(); ++i) {
    const Expr& a = e.args[i];
    if (a.is_call && a.name == "slit") {
      const auto v = numbers(a, key, 4);
      slits.push_back({{v[0], v[1]}, {v[2], v[3]}});
    } else if (a.is_call && a.name == "puncture") {
      const auto v = numbers(a, key, 2);
      punctures.push_back({v[0], v[1]});
    } else {
      cut.push_back(shape_of(a, key).complement());
    }
  }
  if (!cut.empty()) {
    cut.insert(cut.begin(), area);
    area = Shape::intersect(std::move(cut));
  }
  Domain d(area, box);
  for (const auto& s : slits) d.remove_slit(s.a, s.b);
  for (const auto& p : punctures) d.remove_point(p);
  return d;
}

Point point_of(const Expr& e, const std::string& key) {
  if (!e.is_call || e.name != "point") bad(e, key, "expected point(x, y)");
  const auto v = numbers(e, key, 2);
  return {v[0], v[1]};
}

DataFunction data_of(const Expr& e, const std::string& key) {
  if (!e.is_call) return DataFunction::parse("constant", {e.value});
  std::vector<double> args;
  for (const auto& a : e.args) args.push_back(number(a, key));
  try {
    return DataFunction::parse(e.name, std::move(args));
  } catch (const ConfigError& err) {
    bad(e, key, err.what());
  }
}

int integer(const Expr& e, const std::string& key, int lo, int hi) {
  const double v = number(e, key);
  if (v != std::floor(v) || v < lo || v > hi)
    bad(e, key, "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

double positive(const Expr& e, const std::string& key) {
  const double v = number(e, key);
  if (!(v > 0.0) || !std::isfinite(v)) bad(e, key, "expected a positive number");
  return v;
}

bool boolean(const Expr& e, const std::string& key) {
  if (e.is_call && e.args.empty() && (e.name == "true" || e.name == "false")) return e.name == "true";
  bad(e, key, "expected true or false");
}

std::string ident(const Expr& e, const std::string& key) {
  if (!e.is_call || !e.args.empty()) bad(e, key, "expected a name");
  return e.name;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "task",        "phi",          "domain",       "box",       "x0",         "K",
      "ambient",     "restriction",  "h",            "data",      "obstacle",   "side",
      "tol_energy",  "tol_grad",     "eps_flux",     "max_iters", "metric",     "rho",
      "scales",      "nodes_per_radius", "r",        "radii",     "exterior_check", "perron_tol",
      "max_sweeps",  "samples",      "seed",         "out"};
  return keys;
}

bool raw_key(const std::string& key) { return key == "task" || key == "out"; }

void require(bool ok, const std::string& key, Task task) {
  if (!ok) throw ConfigError(std::string("task ") + to_string(task) + " requires '" + key + "'", key);
}

std::string str(double v) { return format_number(v); }

}  // namespace

void validate(const Scenario& s) {
  switch (s.task) {
    case Task::check_phi:
      require(s.phi.has_value(), "phi", s.task);
      break;
    case Task::solve:
    case Task::perron:
      require(s.phi.has_value(), "phi", s.task);
      require(s.domain.has_value(), "domain", s.task);
      break;
    case Task::capacity:
      require(s.phi.has_value(), "phi", s.task);
      require(s.K.has_value(), "K", s.task);
      require(s.ambient.has_value(), "ambient", s.task);
      break;
    case Task::potential:
      require(s.phi.has_value(), "phi", s.task);
      require((s.K && s.ambient) || (s.domain && s.x0), "K", s.task);
      break;
    case Task::wiener:
      require(s.phi.has_value(), "phi", s.task);
      require(s.domain.has_value(), "domain", s.task);
      require(s.x0.has_value(), "x0", s.task);
      break;
  }
  if (!(s.h > 0.0)) throw ConfigError("h must be positive", "h");
}

Scenario parse_config(std::string_view text, const std::string& source) {
  std::map<std::string, Entry> entries;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i == line.size()) {
      if (end == text.size()) break;
      continue;
    }
    const std::size_t key_start = i;
    while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) ++i;
    const std::string key(line.substr(key_start, i - key_start));
    if (key.empty()) throw ConfigError(source + ": expected a key", "", line_no, static_cast<int>(key_start) + 1);
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size() || line[i] != '=')
      throw ConfigError(source + ": expected '=' after '" + key + "'", key, line_no, static_cast<int>(i) + 1);
    ++i;
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
      throw ConfigError(source + ": unknown key '" + key + "'", key, line_no, static_cast<int>(key_start) + 1);
    if (entries.count(key))
      throw ConfigError(source + ": duplicate key '" + key + "'", key, line_no, static_cast<int>(key_start) + 1);
    Entry e;
    e.line = line_no;
    e.column = static_cast<int>(i) + 1;
    std::string_view value = line.substr(i);
    while (!value.empty() && std::isspace(static_cast<unsigned char>(value.front()))) {
      value.remove_prefix(1);
      ++e.column;
    }
    while (!value.empty() && std::isspace(static_cast<unsigned char>(value.back()))) value.remove_suffix(1);
    if (value.empty()) throw ConfigError(source + ": empty value for '" + key + "'", key, line_no, e.column);
    e.raw = std::string(value);
    if (!raw_key(key)) {
      e.expr = ExprParser(value, key, line_no, e.column).parse();
      e.parsed = true;
    }
    entries.emplace(key, std::move(e));
    if (end == text.size()) break;
  }

  Scenario s;
  auto has = [&](const char* k) { return entries.count(k) > 0; };
  auto ex = [&](const char* k) -> const Expr& { return entries.at(k).expr; };
  const std::string* current = nullptr;
  try {
    for (const auto& [key, entry] : entries) {
      current = &key;
      (void)entry;
      if (key == "task") {
        const auto t = parse_task(entry.raw);
        if (!t) throw ConfigError("unknown task '" + entry.raw + "'", key, entry.line, entry.column);
        s.task = *t;
        s.task_defaulted = false;
      } else if (key == "out") {
        s.out = entry.raw;
      } else if (key == "phi") {
        s.phi = phi_of(entry.expr, key);
      } else if (key == "box") {
        const Expr& e = entry.expr;
        if (!e.is_call || e.name != "rect") bad(e, key, "expected rect(x0, y0, x1, y1)");
        const auto v = numbers(e, key, 4);
        s.box = Box{v[0], v[1], v[2], v[3]};
        if (!(s.box->x1 > s.box->x0) || !(s.box->y1 > s.box->y0)) bad(e, key, "box must have positive extent");
      } else if (key == "x0") {
        s.x0 = point_of(entry.expr, key);
      } else if (key == "K") {
        s.K = shape_of(entry.expr, key);
      } else if (key == "ambient") {
        s.ambient = shape_of(entry.expr, key);
      } else if (key == "restriction") {
        const Expr& e = entry.expr;
        if (!e.is_call || e.name != "ball") bad(e, key, "expected ball(cx, cy, r)");
        const auto v = numbers(e, key, 3);
        if (!(v[2] > 0.0)) bad(e, key, "radius must be positive");
        s.restriction = Ball{{v[0], v[1]}, v[2]};
      } else if (key == "h") {
        s.h = positive(entry.expr, key);
        s.h_defaulted = false;
      } else if (key == "data") {
        s.data = data_of(entry.expr, key);
      } else if (key == "obstacle") {
        s.obstacle = data_of(entry.expr, key);
      } else if (key == "side") {
        const auto v = ident(entry.expr, key);
        if (v != "upper" && v != "lower") bad(entry.expr, key, "side is upper or lower");
        s.side = v == "upper" ? ObstacleSide::upper : ObstacleSide::lower;
      } else if (key == "tol_energy") {
        s.solve.tol_energy = positive(entry.expr, key);
      } else if (key == "tol_grad") {
        s.solve.tol_grad = positive(entry.expr, key);
      } else if (key == "eps_flux") {
        s.solve.eps_flux = number(entry.expr, key);
        if (!(s.solve.eps_flux >= 0.0)) bad(entry.expr, key, "eps_flux must be nonnegative");
      } else if (key == "max_iters") {
        s.solve.max_iters = integer(entry.expr, key, 1, 1000000);
      } else if (key == "metric") {
        const auto v = ident(entry.expr, key);
        if (v != "newton" && v != "diagonal") bad(entry.expr, key, "metric is newton or diagonal");
        s.solve.metric = v == "newton" ? Metric::newton : Metric::diagonal;
      } else if (key == "rho") {
        s.rho = positive(entry.expr, key);
      } else if (key == "scales") {
        s.scales = integer(entry.expr, key, 0, 12);
      } else if (key == "nodes_per_radius") {
        s.nodes_per_radius = integer(entry.expr, key, 4, 4096);
      } else if (key == "r") {
        s.r = positive(entry.expr, key);
      } else if (key == "radii") {
        const Expr& e = entry.expr;
        if (!e.is_call || e.name != "list") bad(e, key, "expected list(r1, r2, ...)");
        for (const auto& a : e.args) s.radii.push_back(positive(a, key));
      } else if (key == "exterior_check") {
        s.exterior_check = boolean(entry.expr, key);
      } else if (key == "perron_tol") {
        s.perron_tol = positive(entry.expr, key);
      } else if (key == "max_sweeps") {
        s.max_sweeps = integer(entry.expr, key, 1, 1000000);
      } else if (key == "samples") {
        s.samples = integer(entry.expr, key, 0, 100000000);
      } else if (key == "seed") {
        const double v = number(entry.expr, key);
        if (v < 0 || v != std::floor(v) || v > 9.007199254740992e15) bad(entry.expr, key, "seed is a nonnegative integer");
        s.seed = static_cast<std::uint64_t>(v);
      }
    }
    if (has("domain")) {
      static const std::string domain_key = "domain";
      current = &domain_key;
      s.domain = domain_of(ex("domain"), "domain", s.box);
      if (s.x0) s.domain->mark(*s.x0);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    const std::string key = current ? *current : std::string();
    const auto it = entries.find(key);
    throw ConfigError(source + ": " + e.what(), key, it == entries.end() ? 0 : it->second.line,
                      it == entries.end() ? 0 : it->second.column);
  }
  if (s.h_defaulted) s.notes.push_back("h not given; defaulted to " + str(s.h));
  if (has("task")) {
    try {
      validate(s);
    } catch (const ConfigError& e) {
      const auto it = entries.find(e.path());
      throw ConfigError(source + ": " + e.what(), e.path(), it == entries.end() ? 0 : it->second.line,
                        it == entries.end() ? 0 : it->second.column);
    }
  }
  return s;
}

Scenario load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string(), "config");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::vector<std::pair<std::string, std::string>> Scenario::resolved() const {
  std::vector<std::pair<std::string, std::string>> kv;
  auto put = [&](const char* k, std::string v) { kv.emplace_back(k, std::move(v)); };
  put("task", to_string(task));
  if (phi) put("phi", phi->spec());
  if (domain) put("domain", domain->spec());
  if (box) put("box", "rect(" + str(box->x0) + ", " + str(box->y0) + ", " + str(box->x1) + ", " + str(box->y1) + ")");
  if (x0) put("x0", "point(" + str(x0->x) + ", " + str(x0->y) + ")");
  if (K) put("K", K->spec());
  if (ambient) put("ambient", ambient->spec());
  if (restriction)
    put("restriction", "ball(" + str(restriction->center.x) + ", " + str(restriction->center.y) + ", " +
                           str(restriction->radius) + ")");
  put("h", str(h));
  put("data", data.spec());
  if (obstacle) put("obstacle", obstacle->spec());
  put("side", side == ObstacleSide::upper ? "upper" : "lower");
  put("tol_energy", str(solve.tol_energy));
  put("tol_grad", str(solve.tol_grad));
  put("eps_flux", str(solve.eps_flux));
  put("max_iters", std::to_string(solve.max_iters));
  put("metric", solve.metric == Metric::newton ? "newton" : "diagonal");
  put("rho", str(rho));
  put("scales", std::to_string(scales));
  put("nodes_per_radius", std::to_string(nodes_per_radius));
  put("r", str(r));
  if (!radii.empty()) {
    std::string v = "list(";
    for (std::size_t i = 0; i < radii.size(); ++i) v += (i ? ", " : "") + str(radii[i]);
    put("radii", v + ")");
  }
  put("exterior_check", exterior_check ? "true" : "false");
  put("perron_tol", str(perron_tol));
  put("max_sweeps", std::to_string(max_sweeps));
  put("samples", std::to_string(samples));
  put("seed", std::to_string(seed));
  put("out", out);
  return kv;
}

bool operator==(const Scenario& a, const Scenario& b) { return a.resolved() == b.resolved(); }

std::string to_config(const Scenario& s) {
  std::string text;
  for (const auto& [k, v] : s.resolved()) text += k + " = " + v + "\n";
  return text;
}

// --- tasks ------------------------------------------------------------------

namespace {

ordered_json number_json(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ordered_json point_json(Point p) { return ordered_json::array({p.x, p.y}); }

std::string field_csv(const Mesh& mesh, const std::vector<std::pair<std::string, const Field*>>& columns) {
  std::ostringstream os;
  os << "index,x,y,class";
  for (const auto& c : columns) os << ',' << c.first;
  os << '\n';
  for (int n = 0; n < mesh.node_count(); ++n) {
    if (!mesh.is_active(n)) continue;
    const Point p = mesh.node(n);
    os << n << ',' << format_17g(p.x) << ',' << format_17g(p.y) << ',' << orlicz::to_string(mesh.node_class(n));
    for (const auto& c : columns) os << ',' << format_17g((*c.second)[static_cast<std::size_t>(n)]);
    os << '\n';
  }
  return os.str();
}

Field sample(const Mesh& mesh, const DataFunction& f) {
  Field v(static_cast<std::size_t>(mesh.node_count()), 0.0);
  for (int n = 0; n < mesh.node_count(); ++n)
    if (mesh.is_active(n)) v[static_cast<std::size_t>(n)] = f(mesh.node(n));
  return v;
}

ordered_json solve_json(const SolveResult& r) {
  return {{"energy", number_json(r.energy)},
          {"iterations", r.iterations},
          {"residual_norm", number_json(r.residual_norm)},
          {"residual_scale", number_json(r.residual_scale)},
          {"converged", r.converged}};
}

struct Run {
  ordered_json result = ordered_json::object();
  std::vector<Artifact> files;
  bool converged = true;
};

Run run_check_phi(const Scenario& s) {
  Run run;
  const PhiFunction& phi = *s.phi;
  const Box box = s.box.value_or(Box{-0.5, -0.5, 0.5, 0.5});
  std::vector<double> radii = s.radii;
  if (radii.empty()) radii = {0.5, 0.25, 0.125, 0.0625};
  const auto sc = phi.sc_constants();
  const auto est = estimate_sc_constants(phi, box);
  const auto cond = check_conditions(phi, box, radii);

  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> ux(box.x0, box.x1);
  std::uniform_real_distribution<double> uy(box.y0, box.y1);
  std::uniform_real_distribution<double> ulog(-5.0, 5.0);
  int violations = 0;
  double worst_equality = 0.0;
  for (int i = 0; i < s.samples; ++i) {
    const Point x{ux(rng), uy(rng)};
    const double t = std::exp(ulog(rng));
    const double v = std::exp(ulog(rng));
    const double rhs = phi.G(x, t) + phi.conjugate(x, v);
    if (t * v > rhs * (1.0 + 1e-9) + 1e-300) ++violations;
    const double gt = phi.g(x, t);
    const double eq = phi.G(x, t) + phi.conjugate(x, gt);
    worst_equality = std::max(worst_equality, std::abs(eq - t * gt) / std::max(t * gt, 1e-300));
  }

  ordered_json verdicts = ordered_json::array();
  for (const auto& v : cond.verdicts)
    verdicts.push_back({{"condition", v.condition},
                        {"window", v.window},
                        {"sup_ratio", number_json(v.sup_ratio)},
                        {"threshold", v.threshold},
                        {"holds", v.holds}});
  run.result = {{"phi", phi.spec()},
                {"box", {box.x0, box.y0, box.x1, box.y1}},
                {"sc_certified", {{"lower", sc.lower}, {"upper", sc.upper}}},
                {"sc_sampled", {{"lower", est.lower}, {"upper", est.upper}, {"violation", est.violation}}},
                {"a0_constant", phi.a0_constant()},
                {"conditions", verdicts},
                {"balls_sampled", cond.balls_sampled},
                {"young", {{"samples", s.samples}, {"violations", violations}, {"max_equality_error", worst_equality}}}};

  std::ostringstream csv;
  csv << "condition,radius,t_lo,t_hi,sup_ratio\n";
  std::ostringstream plot;
  plot << "# radius sup_ratio (A1n)\n";
  for (const auto& row : cond.rows) {
    csv << row.condition << ',' << format_17g(row.radius) << ',' << format_17g(row.t_lo) << ','
        << format_17g(row.t_hi) << ',' << format_17g(row.sup_ratio) << '\n';
    if (row.condition == "A1n") plot << format_17g(row.radius) << ' ' << format_17g(row.sup_ratio) << '\n';
  }
  run.files.push_back({"check-phi.csv", csv.str()});
  run.files.push_back({"check-phi.plot", plot.str()});
  return run;
}

Run run_solve(const Scenario& s) {
  Run run;
  const Mesh mesh = build_mesh(*s.domain, s.h);
  const Field data = sample(mesh, s.data);
  const SolveResult r = s.obstacle ? solve_obstacle(mesh, *s.phi, sample(mesh, *s.obstacle), data, s.solve, s.side)
                                   : solve_dirichlet(mesh, *s.phi, data, s.solve);
  run.result = solve_json(r);
  run.result["nodes"] = mesh.node_count();
  run.result["interior_nodes"] = static_cast<int>(free_nodes(mesh).size());
  run.result["obstacle"] = s.obstacle ? ordered_json(s.obstacle->spec()) : ordered_json(nullptr);
  run.converged = r.converged;
  const std::string csv = field_csv(mesh, {{"value", &r.field}});
  run.files.push_back({"solve.csv", csv});
  run.files.push_back({"minimizer.csv", csv});
  return run;
}

Run run_capacity(const Scenario& s) {
  Run run;
  const Domain ambient(*s.ambient, s.box);
  const Mesh mesh = build_mesh(ambient, s.h);
  const auto cap = relative_capacity(mesh, *s.phi, nodes_in(mesh, *s.K), s.solve, ambient.spec());
  run.result = {{"value", cap.value},
                {"h", cap.mesh_h},
                {"K_spec", s.K->spec()},
                {"omega_spec", cap.omega_spec},
                {"K_nodes", static_cast<int>(cap.K_nodes.size())},
                {"iterations", cap.iterations},
                {"residual_norm", number_json(cap.residual_norm)},
                {"converged", cap.converged}};
  run.converged = cap.converged;
  run.files.push_back({"minimizer.csv", field_csv(mesh, {{"value", &cap.minimizer}})});
  return run;
}

std::string measure_csv(const Mesh& mesh, const NodalMeasure& mu) {
  std::ostringstream os;
  os << "index,x,y,class,weight\n";
  for (int n = 0; n < mesh.node_count(); ++n) {
    if (!mesh.is_active(n)) continue;
    const Point p = mesh.node(n);
    os << n << ',' << format_17g(p.x) << ',' << format_17g(p.y) << ',' << orlicz::to_string(mesh.node_class(n))
       << ',' << format_17g(mu.weights[static_cast<std::size_t>(n)]) << '\n';
  }
  return os.str();
}

ordered_json potential_json(const PotentialResult& p) {
  return {{"capacity", p.capacity_value},
          {"measure_K", p.measure_K},
          {"ratio", number_json(p.ratio)},
          {"measure_total", p.measure.total},
          {"boundary_flux", p.measure.boundary_flux},
          {"min_weight", p.measure.min_weight},
          {"negative_nodes", static_cast<int>(p.measure.negative_nodes.size())},
          {"K_nodes", static_cast<int>(p.K_nodes.size())},
          {"iterations", p.iterations},
          {"residual_norm", number_json(p.residual_norm)},
          {"converged", p.converged}};
}

Run run_potential(const Scenario& s) {
  Run run;
  WienerOptions wo;
  wo.nodes_per_radius = s.nodes_per_radius;
  wo.solve = s.solve;
  if (s.K && s.ambient) {
    const Mesh mesh = build_mesh(Domain(*s.ambient, s.box), s.h);
    const auto pot = g_potential(mesh, *s.phi, nodes_in(mesh, *s.K), s.solve);
    run.result = potential_json(pot);
    run.result["mode"] = "set";
    run.converged = pot.converged;
    run.files.push_back({"potential.csv", field_csv(mesh, {{"value", &pot.field}})});
    run.files.push_back({"measure.csv", measure_csv(mesh, pot.measure)});
    return run;
  }
  std::vector<double> radii = s.radii;
  if (radii.empty())
    for (double f : {0.5, 0.25, 0.125, 0.0625}) radii.push_back(f * s.r);
  const double h = s.r / s.nodes_per_radius;
  const auto pot = boundary_potential(*s.phi, *s.domain, *s.x0, s.r, h, s.solve);
  const auto table = potential_decay_profile(pot, *s.phi, *s.domain, *s.x0, radii, s.r, wo);
  run.result = potential_json(pot);
  run.result["mode"] = "decay";
  run.result["x0"] = point_json(*s.x0);
  run.result["r"] = s.r;
  run.result["h"] = h;
  run.result["monotone"] = table.monotone;
  ordered_json rows = ordered_json::array();
  std::ostringstream csv;
  csv << "rho,sup_one_minus_u,log_ratio,partial_integral,c_fit,measure_ball,lemma_lhs,lemma_rhs,lemma_c\n";
  std::ostringstream plot;
  plot << "# partial_integral log_ratio\n";
  for (const auto& row : table.rows) {
    rows.push_back({{"rho", row.rho},
                    {"sup_one_minus_u", row.sup_one_minus_u},
                    {"log_ratio", number_json(row.log_ratio)},
                    {"partial_integral", row.partial_integral},
                    {"c_fit", number_json(row.c_fit)},
                    {"measure_ball", row.measure_ball},
                    {"lemma_lhs", row.lemma_lhs},
                    {"lemma_rhs", row.lemma_rhs},
                    {"lemma_c", number_json(row.lemma_c)}});
    csv << format_17g(row.rho) << ',' << format_17g(row.sup_one_minus_u) << ',' << format_17g(row.log_ratio) << ','
        << format_17g(row.partial_integral) << ',' << format_17g(row.c_fit) << ',' << format_17g(row.measure_ball)
        << ',' << format_17g(row.lemma_lhs) << ',' << format_17g(row.lemma_rhs) << ',' << format_17g(row.lemma_c)
        << '\n';
    plot << format_17g(row.partial_integral) << ' ' << format_17g(row.log_ratio) << '\n';
    }
  run.result["decay"] = rows;
  for (const auto& w : table.integrand) run.converged = run.converged && w.converged;
  run.converged = run.converged && pot.converged;
  run.files.push_back({"potential.csv", csv.str()});
  run.files.push_back({"potential.plot", plot.str()});
  run.files.push_back({"measure.csv", measure_csv(pot.mesh, pot.measure)});
  return run;
}

Run run_wiener(const Scenario& s) {
  Run run;
  WienerOptions wo;
  wo.nodes_per_radius = s.nodes_per_radius;
  wo.solve = s.solve;
  const auto rep = wiener_integral(*s.phi, *s.domain, *s.x0, s.rho, s.scales, wo);
  ordered_json samples = ordered_json::array();
  std::ostringstream csv;
  csv << "t,h,cap_raw,cap_floor,cap,W,increment,partial_sum\n";
  std::ostringstream plot;
  plot << "# ln(1/t) partial_sum\n";
  for (std::size_t j = 0; j < rep.samples.size(); ++j) {
    const auto& w = rep.samples[j];
    samples.push_back({{"t", w.t},
                       {"h", w.h},
                       {"cap_raw", w.cap_raw},
                       {"cap_floor", w.cap_floor},
                       {"cap", w.cap},
                       {"W", w.W},
                       {"increment", rep.increments[j]},
                       {"partial_sum", rep.partial_sums[j]},
                       {"converged", w.converged}});
    csv << format_17g(w.t) << ',' << format_17g(w.h) << ',' << format_17g(w.cap_raw) << ','
        << format_17g(w.cap_floor) << ',' << format_17g(w.cap) << ',' << format_17g(w.W) << ','
        << format_17g(rep.increments[j]) << ',' << format_17g(rep.partial_sums[j]) << '\n';
    plot << format_17g(std::log(1.0 / w.t)) << ' ' << format_17g(rep.partial_sums[j]) << '\n';
    run.converged = run.converged && w.converged;
  }
  run.result = {{"x0", point_json(rep.x0)},
                {"rho", rep.rho},
                {"classification", to_string(rep.classification)},
                {"slope", rep.slope},
                {"slope_threshold", rep.slope_threshold},
                {"thresholds",
                 {{"slope_fraction", rep.thresholds.slope_fraction},
                  {"floor_fraction", rep.thresholds.floor_fraction},
                  {"tail_ratio", rep.thresholds.tail_ratio},
                  {"tail_scales", rep.thresholds.tail_scales},
                  {"min_scales", rep.thresholds.min_scales}}},
                {"nodes_per_radius", s.nodes_per_radius},
                {"truncated", rep.truncated},
                {"warnings", rep.warnings},
                {"samples", samples}};
  if (s.exterior_check) {
    std::vector<double> scales(rep.radii.begin(), rep.radii.begin() + std::min<std::size_t>(3, rep.radii.size()));
    const auto ext = exterior_sphere_check(*s.phi, *s.domain, *s.x0, scales, wo);
    ordered_json rows = ordered_json::array();
    for (const auto& r : ext.rows)
      rows.push_back({{"r", r.r}, {"cap_complement", r.cap_complement}, {"cap_ball", r.cap_ball}, {"ratio", r.ratio}});
    run.result["exterior_sphere"] = {{"on_boundary", ext.on_boundary},
                                     {"has_exterior_ball", ext.has_exterior_ball},
                                     {"normal", point_json(ext.normal)},
                                     {"ball_radius", ext.ball_radius},
                                     {"min_ratio", ext.min_ratio},
                                     {"consistent", ext.consistent},
                                     {"rows", rows}};
  }
  run.files.push_back({"wiener.csv", csv.str()});
  run.files.push_back({"wiener.plot", plot.str()});
  return run;
}

Run run_perron(const Scenario& s) {
  Run run;
  const Mesh mesh = build_mesh(*s.domain, s.h);
  const Field data = sample(mesh, s.data);
  PerronOptions po;
  po.solve = s.solve;
  po.tol = s.perron_tol;
  po.max_sweeps = s.max_sweeps;
  const auto res = resolutivity_gap(mesh, *s.phi, data, po);
  const auto sob = solve_dirichlet(mesh, *s.phi, data, s.solve);
  double agreement = 0.0;
  for (int n = 0; n < mesh.node_count(); ++n)
    if (mesh.is_active(n))
      agreement = std::max(agreement, std::abs(res.upper[static_cast<std::size_t>(n)] -
                                               sob.field[static_cast<std::size_t>(n)]));
  run.result = {{"gap", res.gap},
                {"order_violation", res.order_violation},
                {"sweeps", res.sweeps},
                {"converged", res.converged},
                {"cover_balls", static_cast<int>(res.ball_cover.size())},
                {"sobolev_agreement", agreement},
                {"dirichlet", solve_json(sob)}};
  run.converged = res.converged && sob.converged;
  if (s.restriction) {
    const auto audit = sobolev_agreement(*s.domain, s.h, *s.phi, s.data, po, *s.restriction);
    const auto& r = *audit.restriction;
    run.result["restriction"] = {{"center", point_json(r.x0)},
                                 {"radius", r.radius},
                                 {"sup_diff", r.sup_diff},
                                 {"nodes", r.nodes},
                                 {"converged", r.converged}};
    run.converged = run.converged && audit.converged;
  }
  run.files.push_back({"perron.csv", field_csv(mesh, {{"upper", &res.upper}, {"lower", &res.lower}})});
  return run;
}

}  // namespace

TaskOutput run_task(const Scenario& s) {
  validate(s);
  Run run;
  switch (s.task) {
    case Task::check_phi:
      run = run_check_phi(s);
      break;
    case Task::solve:
      run = run_solve(s);
      break;
    case Task::capacity:
      run = run_capacity(s);
      break;
    case Task::potential:
      run = run_potential(s);
      break;
    case Task::wiener:
      run = run_wiener(s);
      break;
    case Task::perron:
      run = run_perron(s);
      break;
  }
  TaskOutput out;
  ordered_json config = ordered_json::object();
  for (const auto& [k, v] : s.resolved()) config[k] = v;
  out.report = {{"task", to_string(s.task)},
                {"config", config},
                {"notes", s.notes},
                {"result", std::move(run.result)},
                {"converged", run.converged}};
  out.converged = run.converged;
  out.artifacts.push_back({std::string(to_string(s.task)) + ".json", out.report.dump(2) + "\n"});
  for (auto& f : run.files) out.artifacts.push_back(std::move(f));
  return out;
}

// --- output -----------------------------------------------------------------

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

namespace {

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace

std::vector<ManifestEntry> emit_report(const std::vector<Artifact>& artifacts, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<ManifestEntry> manifest;
  for (const auto& a : artifacts) {
    write_atomic(out_dir / a.name, a.content);
    manifest.push_back({a.name, sha256_hex(a.content), a.content.size()});
  }
  ordered_json files = ordered_json::array();
  for (const auto& m : manifest) files.push_back({{"name", m.name}, {"sha256", m.sha256}, {"bytes", m.bytes}});
  write_atomic(out_dir / "manifest.json", ordered_json{{"files", files}}.dump(2) + "\n");
  return manifest;
}

int run_command(int argc, char** argv) {
  CLI::App app{"Boundary regularity analysis for generalized Orlicz energies", "orlicz-regularity"};
  app.set_help_flag("--help", "print this help and exit");
  std::string task_name;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<double> h;
  std::optional<int> scales;
  std::optional<std::uint64_t> seed;
  app.add_option("task", task_name, "check-phi | solve | capacity | potential | wiener | perron")->required();
  app.add_option("--config", config_path, "scenario file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--h", h, "mesh step");
  app.add_option("--scales", scales, "number of dyadic scales after the first (wiener)");
  app.add_option("--seed", seed, "sampling seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto task = parse_task(task_name);
    if (!task) throw ConfigError("unknown task '" + task_name + "'", "task");
    Scenario s = load_config(config_path);
    if (!s.task_defaulted && s.task != *task)
      throw ConfigError(std::string("config is for task ") + to_string(s.task) + ", not " + task_name, "task");
    s.task = *task;
    if (out_dir) s.out = *out_dir;
    if (h) {
      if (!(*h > 0.0)) throw ConfigError("--h must be positive", "h");
      s.h = *h;
      if (s.h_defaulted) {
        s.h_defaulted = false;
        s.notes.erase(std::remove_if(s.notes.begin(), s.notes.end(),
                                     [](const std::string& n) { return n.rfind("h not given", 0) == 0; }),
                      s.notes.end());
      }
    }
    if (scales) {
      if (*scales < 0 || *scales > 12) throw ConfigError("--scales must lie in [0, 12]", "scales");
      s.scales = *scales;
    }
    if (seed) s.seed = *seed;
    validate(s);

    TaskOutput out;
    try {
      out = run_task(s);
    } catch (const NumericError&) {
      throw;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::runtime_error& e) {
      // geometry, refinement and infeasibility problems trace back to the scenario
      if (dynamic_cast<const GeometryError*>(&e) || dynamic_cast<const RefinementError*>(&e) ||
          dynamic_cast<const InfeasibleError*>(&e))
        throw ConfigError(e.what(), "scenario");
      throw;
    } catch (const std::logic_error& e) {
      throw ConfigError(e.what(), "scenario");
    }
    const auto manifest = emit_report(out.artifacts, s.out);
    std::cout << to_string(s.task) << ": wrote " << manifest.size() << " files to " << s.out
              << (out.converged ? "" : " (solver did not converge)") << '\n';
    return out.converged ? 0 : 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error";
    if (!e.path().empty()) std::cerr << " [" << e.path() << "]";
    if (e.line() > 0) std::cerr << " at line " << e.line() << ", column " << e.column();
    std::cerr << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace orlicz::cli
