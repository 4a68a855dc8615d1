#include "swarmlab/config.hpp"

#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "swarmlab/errors.hpp"

namespace swarmlab {

namespace {

struct ParsedValue {
  enum class Kind { number, boolean, text, array } kind = Kind::number;
  double num = 0.0;
  bool flag = false;
  std::string text;
  std::vector<ParsedValue> items;
  int line = 0;
};

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

ParsedValue parse_scalar(const std::string& raw, int line) {
  ParsedValue v;
  v.line = line;
  if (raw.empty()) fail(line, "empty value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"')
      fail(line, "unterminated string");
    v.kind = ParsedValue::Kind::text;
    v.text = raw.substr(1, raw.size() - 2);
    return v;
  }
  if (raw == "true" || raw == "false") {
    v.kind = ParsedValue::Kind::boolean;
    v.flag = raw == "true";
    return v;
  }
  char* end = nullptr;
  const double num = std::strtod(raw.c_str(), &end);
  if (end != nullptr && *end == '\0' && end != raw.c_str()) {
    v.kind = ParsedValue::Kind::number;
    v.num = num;
    return v;
  }
  // Bare words stand for enum-like strings (perturbation = gaussian).
  for (char c : raw)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
      fail(line, "cannot parse value '" + raw + "'");
  v.kind = ParsedValue::Kind::text;
  v.text = raw;
  return v;
}

ParsedValue parse_value(const std::string& raw, int line) {
  if (!raw.empty() && raw.front() == '[') {
    if (raw.back() != ']') fail(line, "unterminated array");
    ParsedValue v;
    v.kind = ParsedValue::Kind::array;
    v.line = line;
    std::string body = raw.substr(1, raw.size() - 2);
    std::string item;
    bool quoted = false;
    for (char c : body) {
      if (c == '"') quoted = !quoted;
      if (c == ',' && !quoted) {
        const std::string t = trim(item);
        if (!t.empty()) v.items.push_back(parse_scalar(t, line));
        item.clear();
      } else {
        item += c;
      }
    }
    const std::string t = trim(item);
    if (!t.empty()) v.items.push_back(parse_scalar(t, line));
    return v;
  }
  return parse_scalar(raw, line);
}

double want_number(const ParsedValue& v) {
  if (v.kind != ParsedValue::Kind::number) fail(v.line, "expected a number");
  return v.num;
}

int want_int(const ParsedValue& v) {
  const double d = want_number(v);
  if (d != std::floor(d)) fail(v.line, "expected an integer");
  return static_cast<int>(d);
}

std::uint64_t want_u64(const ParsedValue& v) {
  const double d = want_number(v);
  if (d < 0.0 || d != std::floor(d)) fail(v.line, "expected a nonnegative integer");
  return static_cast<std::uint64_t>(d);
}

bool want_bool(const ParsedValue& v) {
  if (v.kind != ParsedValue::Kind::boolean) fail(v.line, "expected true/false");
  return v.flag;
}

std::string want_text(const ParsedValue& v) {
  if (v.kind != ParsedValue::Kind::text) fail(v.line, "expected a string");
  return v.text;
}

std::vector<double> want_number_array(const ParsedValue& v) {
  if (v.kind != ParsedValue::Kind::array) fail(v.line, "expected an array");
  std::vector<double> out;
  for (const ParsedValue& item : v.items) out.push_back(want_number(item));
  return out;
}

void apply_kernel(KernelSpec& k, const std::string& key,
                  const ParsedValue& v) {
  if (key == "dim") k.dim = want_int(v);
  else if (key == "s") k.s = want_number(v);
  else if (key == "alpha") k.alpha = want_number(v);
  else if (key == "beta") k.beta = want_number(v);
  else if (key == "delta") k.delta = want_number(v);
  else if (key == "c") k.perturbation.c = want_number(v);
  else if (key == "sigma_w") k.perturbation.sigma_w = want_number(v);
  else if (key == "perturbation") {
    const std::string t = want_text(v);
    if (t == "none") k.perturbation.kind = PerturbationKind::none;
    else if (t == "gaussian") k.perturbation.kind = PerturbationKind::gaussian;
    else fail(v.line, "unknown perturbation '" + t + "'");
  } else if (key == "lambda") {
    const std::vector<double> arr = want_number_array(v);
    if (arr.empty() || arr.size() > kMaxDim)
      fail(v.line, "lambda needs 1 to 3 entries");
    for (size_t j = 0; j < arr.size(); ++j) k.lambda[j] = arr[j];
  } else {
    fail(v.line, "unknown key '" + key + "' in [kernel]");
  }
}

void apply_minimizer(MinimizerSection& m, const std::string& key,
                     const ParsedValue& v) {
  if (key == "method") {
    const std::string t = want_text(v);
    if (t != "auto" && t != "radial" && t != "ellipsoid" &&
        t != "gradient_flow" && t != "one_dim")
      fail(v.line, "unknown minimizer method '" + t + "'");
    m.method = t;
  } else if (key == "mass") m.mass = want_number(v);
  else if (key == "flow_particles") m.flow_particles = want_int(v);
  else if (key == "flow_steps") m.flow_steps = want_int(v);
  else fail(v.line, "unknown key '" + key + "' in [minimizer]");
}

void apply_simulation(SimulationSection& s, const std::string& key,
                      const ParsedValue& v) {
  if (key == "epsilon") s.epsilon = want_number(v);
  else if (key == "lambda_drag") s.lambda_drag = want_number(v);
  else if (key == "dt") s.dt = want_number(v);
  else if (key == "t_final") s.t_final = want_number(v);
  else if (key == "n_particles") s.n_particles = want_int(v);
  else if (key == "thermal_coeff") s.thermal_coeff = want_number(v);
  else if (key == "c_delta") s.c_delta = want_number(v);
  else if (key == "record_every") s.record_every = want_int(v);
  else if (key == "relax_initial") s.relax_initial = want_bool(v);
  else if (key == "snapshots") s.snapshots = want_bool(v);
  else if (key == "seed") s.seed = want_u64(v);
  else if (key == "X_init" || key == "V_init") {
    const std::vector<double> arr = want_number_array(v);
    if (arr.empty() || arr.size() > kMaxDim)
      fail(v.line, key + " needs 1 to 3 entries");
    auto& dst = key == "X_init" ? s.X_init : s.V_init;
    for (size_t j = 0; j < arr.size(); ++j) dst[j] = arr[j];
  } else {
    fail(v.line, "unknown key '" + key + "' in [simulation]");
  }
}

void apply_sweep(SweepSection& s, const std::string& key,
                 const ParsedValue& v) {
  if (key == "epsilons") {
    s.epsilons = want_number_array(v);
  } else if (key == "seeds") {
    if (v.kind != ParsedValue::Kind::array) fail(v.line, "expected an array");
    s.seeds.clear();
    for (const ParsedValue& item : v.items) s.seeds.push_back(want_u64(item));
  } else {
    fail(v.line, "unknown key '" + key + "' in [sweep]");
  }
}

void apply_field(ExternalFieldSpec& f, const std::string& key,
                 const ParsedValue& v) {
  if (key == "variant") {
    const std::string t = want_text(v);
    if (t == "zero") f.kind = FieldKind::zero;
    else if (t == "constant") f.kind = FieldKind::constant;
    else if (t == "linear") f.kind = FieldKind::linear;
    else if (t == "rotation") f.kind = FieldKind::rotation;
    else fail(v.line, "unknown field variant '" + t + "'");
  } else if (key == "b") {
    const std::vector<double> arr = want_number_array(v);
    if (arr.empty() || arr.size() > kMaxDim)
      fail(v.line, "b needs 1 to 3 entries");
    for (size_t j = 0; j < arr.size(); ++j) f.offset[j] = arr[j];
  } else if (key == "A") {
    const std::vector<double> arr = want_number_array(v);
    if (arr.size() != 4 && arr.size() != 9)
      fail(v.line, "A needs dim*dim entries (row-major)");
    const int d = arr.size() == 4 ? 2 : 3;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) f.matrix[r * kMaxDim + c] = arr[r * d + c];
  } else if (key == "omega") {
    f.omega = want_number(v);
  } else {
    fail(v.line, "unknown key '" + key + "' in [external_field]");
  }
}

void apply_output(OutputSection& o, const std::string& key,
                  const ParsedValue& v) {
  if (key == "directory") o.directory = want_text(v);
  else if (key == "formats") {
    if (v.kind != ParsedValue::Kind::array) fail(v.line, "expected an array");
    o.formats.clear();
    for (const ParsedValue& item : v.items) {
      const std::string t = want_text(item);
      if (t != "csv" && t != "json" && t != "svg")
        fail(item.line, "unknown output format '" + t + "'");
      o.formats.push_back(t);
    }
  } else {
    fail(v.line, "unknown key '" + key + "' in [output]");
  }
}

void validate_loaded(const ExperimentConfig& cfg) {
  try {
    cfg.kernel.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[kernel]: ") + e.what());
  }
  try {
    cfg.external_field.validate(cfg.kernel.dim);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[external_field]: ") + e.what());
  }
  const SimulationSection& s = cfg.simulation;
  if (!(s.epsilon > 0.0)) throw ConfigError("[simulation]: epsilon must be positive");
  if (s.lambda_drag < 0.0) throw ConfigError("[simulation]: lambda_drag must be >= 0");
  if (s.dt < 0.0) throw ConfigError("[simulation]: dt must be >= 0");
  if (!(s.t_final > 0.0)) throw ConfigError("[simulation]: t_final must be positive");
  if (s.n_particles < 1) throw ConfigError("[simulation]: n_particles must be >= 1");
  if (s.thermal_coeff < 0.0) throw ConfigError("[simulation]: thermal_coeff must be >= 0");
  if (!(s.c_delta > 0.0)) throw ConfigError("[simulation]: c_delta must be positive");
  if (s.record_every < 0) throw ConfigError("[simulation]: record_every must be >= 0");
  const MinimizerSection& m = cfg.minimizer;
  if (!(m.mass > 0.0)) throw ConfigError("[minimizer]: mass must be positive");
  if (m.flow_particles < 1) throw ConfigError("[minimizer]: flow_particles must be >= 1");
  if (m.flow_steps < 1) throw ConfigError("[minimizer]: flow_steps must be >= 1");
  for (double e : cfg.sweep.epsilons)
    if (!(e > 0.0)) throw ConfigError("[sweep]: epsilons must be positive");
  if (cfg.sweep.seeds.empty()) throw ConfigError("[sweep]: seeds must be nonempty");
  if (cfg.output.directory.empty()) throw ConfigError("[output]: directory must be nonempty");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "kernel" && section != "minimizer" &&
          section != "simulation" && section != "sweep" &&
          section != "external_field" && section != "output")
        fail(line_no, "unknown section [" + section + "]");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(line_no, "empty key");
    if (section.empty()) fail(line_no, "key outside any [section]");
    const ParsedValue value = parse_value(trim(line.substr(eq + 1)), line_no);
    if (section == "kernel") apply_kernel(cfg.kernel, key, value);
    else if (section == "minimizer") apply_minimizer(cfg.minimizer, key, value);
    else if (section == "simulation") apply_simulation(cfg.simulation, key, value);
    else if (section == "sweep") apply_sweep(cfg.sweep, key, value);
    else if (section == "external_field") apply_field(cfg.external_field, key, value);
    else apply_output(cfg.output, key, value);
  }
  validate_loaded(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_array(const double* v, int n) {
  std::string out = "[";
  for (int j = 0; j < n; ++j) {
    if (j) out += ", ";
    out += fmt(v[j]);
  }
  return out + "]";
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  const int dim = cfg.kernel.dim;
  out << "[kernel]\n";
  out << "dim = " << dim << "\n";
  out << "s = " << fmt(cfg.kernel.s) << "\n";
  out << "alpha = " << fmt(cfg.kernel.alpha) << "\n";
  out << "beta = " << fmt(cfg.kernel.beta) << "\n";
  out << "lambda = " << fmt_array(cfg.kernel.lambda.data(), dim) << "\n";
  out << "perturbation = \""
      << (cfg.kernel.perturbation.kind == PerturbationKind::gaussian
              ? "gaussian"
              : "none")
      << "\"\n";
  out << "c = " << fmt(cfg.kernel.perturbation.c) << "\n";
  out << "sigma_w = " << fmt(cfg.kernel.perturbation.sigma_w) << "\n";
  out << "delta = " << fmt(cfg.kernel.delta) << "\n";
  out << "\n[minimizer]\n";
  out << "method = \"" << cfg.minimizer.method << "\"\n";
  out << "mass = " << fmt(cfg.minimizer.mass) << "\n";
  out << "flow_particles = " << cfg.minimizer.flow_particles << "\n";
  out << "flow_steps = " << cfg.minimizer.flow_steps << "\n";
  out << "\n[simulation]\n";
  out << "epsilon = " << fmt(cfg.simulation.epsilon) << "\n";
  out << "lambda_drag = " << fmt(cfg.simulation.lambda_drag) << "\n";
  out << "dt = " << fmt(cfg.simulation.dt) << "\n";
  out << "t_final = " << fmt(cfg.simulation.t_final) << "\n";
  out << "n_particles = " << cfg.simulation.n_particles << "\n";
  out << "thermal_coeff = " << fmt(cfg.simulation.thermal_coeff) << "\n";
  out << "c_delta = " << fmt(cfg.simulation.c_delta) << "\n";
  out << "record_every = " << cfg.simulation.record_every << "\n";
  out << "relax_initial = "
      << (cfg.simulation.relax_initial ? "true" : "false") << "\n";
  out << "snapshots = " << (cfg.simulation.snapshots ? "true" : "false")
      << "\n";
  out << "seed = " << cfg.simulation.seed << "\n";
  out << "X_init = " << fmt_array(cfg.simulation.X_init.data(), dim) << "\n";
  out << "V_init = " << fmt_array(cfg.simulation.V_init.data(), dim) << "\n";
  out << "\n[sweep]\n";
  if (!cfg.sweep.epsilons.empty()) {
    out << "epsilons = [";
    for (size_t j = 0; j < cfg.sweep.epsilons.size(); ++j) {
      if (j) out << ", ";
      out << fmt(cfg.sweep.epsilons[j]);
    }
    out << "]\n";
  }
  out << "seeds = [";
  for (size_t j = 0; j < cfg.sweep.seeds.size(); ++j) {
    if (j) out << ", ";
    out << cfg.sweep.seeds[j];
  }
  out << "]\n";
  out << "\n[external_field]\n";
  const char* variant = "zero";
  if (cfg.external_field.kind == FieldKind::constant) variant = "constant";
  if (cfg.external_field.kind == FieldKind::linear) variant = "linear";
  if (cfg.external_field.kind == FieldKind::rotation) variant = "rotation";
  out << "variant = \"" << variant << "\"\n";
  out << "b = " << fmt_array(cfg.external_field.offset.data(), dim) << "\n";
  out << "A = [";
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      if (r + c) out << ", ";
      out << fmt(cfg.external_field.matrix[r * kMaxDim + c]);
    }
  out << "]\n";
  out << "omega = " << fmt(cfg.external_field.omega) << "\n";
  out << "\n[output]\n";
  out << "directory = \"" << cfg.output.directory << "\"\n";
  out << "formats = [";
  for (size_t j = 0; j < cfg.output.formats.size(); ++j) {
    if (j) out << ", ";
    out << "\"" << cfg.output.formats[j] << "\"";
  }
  out << "]\n";
  return out.str();
}

}  // namespace swarmlab
