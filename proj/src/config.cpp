#include "dklb/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <sstream>

#include "dklb/ensemble.hpp"
#include "dklb/error.hpp"

namespace dklb {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const ConfigValues& v) : v_(v) {}

  const std::string& raw(const std::string& sec, const std::string& key) const {
    return v_.at(sec).at(key);
  }

  double real(const std::string& sec, const std::string& key) const {
    return to_double(raw(sec, key), sec + "." + key);
  }

  double positive(const std::string& sec, const std::string& key) const {
    const double v = real(sec, key);
    if (!(v > 0.0)) fail(sec, key, "must be positive", raw(sec, key));
    return v;
  }

  double non_negative(const std::string& sec, const std::string& key) const {
    const double v = real(sec, key);
    if (!(v >= 0.0)) fail(sec, key, "must be non-negative", raw(sec, key));
    return v;
  }

  std::optional<double> optional_real(const std::string& sec, const std::string& key) const {
    if (raw(sec, key).empty()) return std::nullopt;
    return real(sec, key);
  }

  long long integer(const std::string& sec, const std::string& key) const {
    const std::string& s = raw(sec, key);
    long long v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(sec, key, "expected an integer", s);
    return v;
  }

  std::size_t count(const std::string& sec, const std::string& key, long long min) const {
    const long long v = integer(sec, key);
    if (v < min) fail(sec, key, "must be >= " + std::to_string(min), raw(sec, key));
    return static_cast<std::size_t>(v);
  }

  bool boolean(const std::string& sec, const std::string& key) const {
    const std::string& s = raw(sec, key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail(sec, key, "expected true or false", s);
    return false;
  }

  std::vector<double> list(const std::string& sec, const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : split(raw(sec, key), ',')) {
      out.push_back(to_double(item, sec + "." + key));
    }
    return out;
  }

  [[noreturn]] static void fail(const std::string& sec, const std::string& key,
                                const std::string& what, const std::string& got) {
    throw ValidationError(sec + "." + key + " " + what + " (got '" + got + "')");
  }

 private:
  static double to_double(const std::string& s, const std::string& field) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
      throw ValidationError(field + " expected a finite number (got '" + s + "')");
    }
    return v;
  }

  const ConfigValues& v_;
};

void set_known(ConfigValues& values, const std::string& sec, const std::string& key,
               const std::string& value) {
  const auto& defaults = config_defaults();
  const auto s = defaults.find(sec);
  if (s == defaults.end()) throw ValidationError("unknown config section [" + sec + "]");
  if (!s->second.contains(key)) throw ValidationError("unknown config key " + sec + "." + key);
  values[sec][key] = value;
}

}  // namespace

const ConfigValues& config_defaults() {
  static const ConfigValues defaults = {
      {"model", {{"phase", "kdvks"}, {"eta", "1"}}},
      {"grid", {{"N", "256"}, {"L", "40"}, {"dealias", "0.6666666666666666"}}},
      {"solver",
       {{"method", "etdrk4"},
        {"T", "0.1"},
        {"dt", "0.001"},
        {"nt", "64"},
        {"tol", "1e-8"},
        {"max_iter", "50"},
        {"s", "0"},
        {"cstar", "1"},
        {"r", ""},
        {"b", ""}}},
      {"initial",
       {{"kind", "gaussian"}, {"center", "0"}, {"width", "2"}, {"norm", "0.1"}, {"id", "0"}}},
      {"weights", {{"list", ""}, {"leakage_threshold", "1e-8"}}},
      {"ensemble", {{"size", "100"}, {"seed", "1"}}},
      {"output", {{"dir", "out"}, {"save_every", "1"}, {"snapshots", "false"}, {"plots", "true"}}},
      {"bracket", {{"max_n", "6"}, {"max_a", "3"}, {"tol", "1e-8"}}},
      {"smoothing",
       {{"case", "C2"},
        {"s", "1"},
        {"a", "2"},
        {"b", "4"},
        {"q", "0.5"},
        {"T", "0.5"},
        {"nt", "64"}}},
      {"conjugation",
       {{"b", "0.25, 0.5"},
        {"t", "0.05, 0.1"},
        {"center", "-10"},
        {"width", "2"},
        {"N", "1024"},
        {"L", "80"}}},
      {"decay",
       {{"k", "2"},
        {"alpha", "0.5"},
        {"gamma", "0.5"},
        {"h", "0.05"},
        {"epsilon", "0.01"},
        {"t", "0.01, 0.05, 0.1, 0.5"},
        {"sigma", ""},
        {"N", "1024"},
        {"L", "60"},
        {"r", "0.5"},
        {"s", "1.5"},
        {"exchange_t", "0.1, 0.5, 1"}}},
      {"existence", {{"norms", ""}, {"cstar", "1"}}},
      {"convergence",
       {{"dts", "0.004, 0.002, 0.001"},
        {"reference_dt", "0.0005"},
        {"T", "0.2"},
        {"N", "128"},
        {"L", "40"},
        {"width", "1.5"},
        {"norm", "10"}}},
  };
  return defaults;
}

ConfigValues load_config_file(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError("config: " + std::string(e.what()));
  }
  ConfigValues values = config_defaults();
  for (const auto& [sec, node] : tree) {
    if (node.empty() && !node.data().empty()) {
      throw ValidationError("config: key '" + sec + "' must be inside a [section]");
    }
    for (const auto& [key, leaf] : node) set_known(values, sec, key, trim(leaf.data()));
  }
  return values;
}

void apply_override(ConfigValues& values, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ValidationError("override must look like section.key=value (got '" + assignment + "')");
  }
  set_known(values, trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)),
            trim(assignment.substr(eq + 1)));
}

std::string to_ini(const ConfigValues& values) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [sec, keys] : values) {
    if (!first) os << '\n';
    first = false;
    os << '[' << sec << "]\n";
    for (const auto& [key, value] : keys) os << key << " = " << value << '\n';
  }
  return os.str();
}

ExperimentConfig build_config(const ConfigValues& values) {
  ConfigValues full = config_defaults();
  for (const auto& [sec, keys] : values) {
    for (const auto& [key, value] : keys) set_known(full, sec, key, value);
  }
  const Reader r(full);
  ExperimentConfig c;
  c.values = full;

  c.model.phase_text = r.raw("model", "phase");
  c.model.eta = r.positive("model", "eta");
  c.model.phase = parse_phase(c.model.phase_text, c.model.eta);

  c.grid.N = r.count("grid", "N", 1);
  c.grid.L = r.positive("grid", "L");
  c.grid.dealias = r.positive("grid", "dealias");
  if (c.grid.dealias > 1.0) Reader::fail("grid", "dealias", "must lie in (0, 1]", r.raw("grid", "dealias"));
  if (c.grid.N < 16 || (c.grid.N & (c.grid.N - 1)) != 0) {
    Reader::fail("grid", "N", "must be a power of two >= 16", r.raw("grid", "N"));
  }

  c.solver.method = r.raw("solver", "method");
  if (c.solver.method != "etdrk4" && c.solver.method != "picard" && c.solver.method != "linear") {
    Reader::fail("solver", "method", "must be etdrk4, picard or linear", c.solver.method);
  }
  c.solver.T = r.positive("solver", "T");
  c.solver.dt = r.positive("solver", "dt");
  c.solver.nt = r.count("solver", "nt", 2);
  c.solver.tol = r.positive("solver", "tol");
  c.solver.max_iter = r.count("solver", "max_iter", 1);
  c.solver.s = r.non_negative("solver", "s");
  c.solver.cstar = r.positive("solver", "cstar");
  c.solver.r = r.optional_real("solver", "r");
  c.solver.b = r.optional_real("solver", "b");
  if (c.solver.r && *c.solver.r < 0.0) Reader::fail("solver", "r", "must be non-negative", r.raw("solver", "r"));

  const std::string kind = r.raw("initial", "kind");
  if (kind == "gaussian") {
    c.initial.kind = InitialKind::Gaussian;
  } else if (kind == "mixture") {
    c.initial.kind = InitialKind::Mixture;
  } else if (kind == "zero") {
    c.initial.kind = InitialKind::Zero;
  } else {
    Reader::fail("initial", "kind", "must be gaussian, mixture or zero", kind);
  }
  c.initial.center = r.real("initial", "center");
  c.initial.width = r.positive("initial", "width");
  c.initial.norm = r.non_negative("initial", "norm");
  c.initial.id = static_cast<std::uint64_t>(r.count("initial", "id", 0));

  for (const std::string& item : split(r.raw("weights", "list"), ',')) {
    const auto colon = item.find(':');
    const std::string name = colon == std::string::npos ? item : trim(item.substr(0, colon));
    const std::string arg = colon == std::string::npos ? "" : trim(item.substr(colon + 1));
    double v = 0.0;
    const auto [p, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
    if (arg.empty() || ec != std::errc() || p != arg.data() + arg.size()) {
      Reader::fail("weights", "list", "entries must look like poly:r, bracket:r or exp:b", item);
    }
    if (name == "poly") {
      c.weights.list.emplace_back(PolyWeight{v});
    } else if (name == "bracket") {
      c.weights.list.emplace_back(BracketWeight{v});
    } else if (name == "exp") {
      c.weights.list.emplace_back(ExpWeight{v});
    } else {
      Reader::fail("weights", "list", "entries must look like poly:r, bracket:r or exp:b", item);
    }
    c.weights.labels.push_back(name + "_" + arg);
  }
  c.weights.leakage_threshold = r.positive("weights", "leakage_threshold");

  c.ensemble.size = r.count("ensemble", "size", 1);
  c.ensemble.seed = static_cast<std::uint64_t>(r.count("ensemble", "seed", 0));

  c.output.dir = r.raw("output", "dir");
  if (c.output.dir.empty()) Reader::fail("output", "dir", "must not be empty", "");
  c.output.save_every = r.count("output", "save_every", 1);
  c.output.snapshots = r.boolean("output", "snapshots");
  c.output.plots = r.boolean("output", "plots");

  c.bracket.max_n = static_cast<int>(r.count("bracket", "max_n", 1));
  c.bracket.max_a = static_cast<int>(r.count("bracket", "max_a", 0));
  c.bracket.tol = r.positive("bracket", "tol");
  if (c.bracket.max_n > 12) Reader::fail("bracket", "max_n", "must be <= 12", r.raw("bracket", "max_n"));

  c.smoothing.kind = parse_smoothing_case(r.raw("smoothing", "case"));
  c.smoothing.s = r.real("smoothing", "s");
  c.smoothing.a = r.real("smoothing", "a");
  c.smoothing.b = r.raw("smoothing", "b") == "inf" ? kInf : r.real("smoothing", "b");
  c.smoothing.q = r.real("smoothing", "q");
  c.smoothing.T = r.positive("smoothing", "T");
  c.smoothing.nt = r.count("smoothing", "nt", 2);

  c.conjugation.b = r.list("conjugation", "b");
  c.conjugation.t = r.list("conjugation", "t");
  if (c.conjugation.b.empty()) Reader::fail("conjugation", "b", "must list at least one value", "");
  if (c.conjugation.t.empty()) Reader::fail("conjugation", "t", "must list at least one value", "");
  for (double v : c.conjugation.b) {
    if (!(v >= 0.0)) Reader::fail("conjugation", "b", "values must be non-negative", r.raw("conjugation", "b"));
  }
  for (double v : c.conjugation.t) {
    if (!(v >= 0.0)) Reader::fail("conjugation", "t", "values must be non-negative", r.raw("conjugation", "t"));
  }
  c.conjugation.center = r.real("conjugation", "center");
  c.conjugation.width = r.positive("conjugation", "width");
  c.conjugation.N = r.count("conjugation", "N", 16);
  c.conjugation.L = r.positive("conjugation", "L");

  c.decay.k = static_cast<int>(r.count("decay", "k", 2));
  c.decay.alpha = r.non_negative("decay", "alpha");
  c.decay.gamma = r.real("decay", "gamma");
  c.decay.h = r.positive("decay", "h");
  c.decay.epsilon = r.non_negative("decay", "epsilon");
  c.decay.t = r.list("decay", "t");
  c.decay.sigma = r.list("decay", "sigma");
  c.decay.N = r.count("decay", "N", 16);
  c.decay.L = r.positive("decay", "L");
  c.decay.r = r.non_negative("decay", "r");
  c.decay.s = r.non_negative("decay", "s");
  c.decay.exchange_t = r.list("decay", "exchange_t");

  c.existence.norms = r.list("existence", "norms");
  c.existence.cstar = r.list("existence", "cstar");
  for (double v : c.existence.norms) {
    if (!(v >= 0.0)) Reader::fail("existence", "norms", "values must be non-negative", r.raw("existence", "norms"));
  }
  if (c.existence.cstar.empty()) Reader::fail("existence", "cstar", "must list at least one value", "");
  for (double v : c.existence.cstar) {
    if (!(v > 0.0)) Reader::fail("existence", "cstar", "values must be positive", r.raw("existence", "cstar"));
  }

  c.convergence.dts = r.list("convergence", "dts");
  c.convergence.reference_dt = r.positive("convergence", "reference_dt");
  c.convergence.T = r.positive("convergence", "T");
  c.convergence.N = r.count("convergence", "N", 16);
  c.convergence.L = r.positive("convergence", "L");
  c.convergence.width = r.positive("convergence", "width");
  c.convergence.norm = r.positive("convergence", "norm");
  if (c.convergence.dts.size() < 2) {
    Reader::fail("convergence", "dts", "must list at least two step sizes", r.raw("convergence", "dts"));
  }
  for (double v : c.convergence.dts) {
    if (!(v > c.convergence.reference_dt)) {
      Reader::fail("convergence", "dts", "values must exceed convergence.reference_dt",
                   r.raw("convergence", "dts"));
    }
  }
  return c;
}

GridPtr ExperimentConfig::make_grid() const { return SpectralGrid::create(grid.N, grid.L, grid.dealias); }

SpectralField ExperimentConfig::make_initial(const GridPtr& g) const {
  switch (initial.kind) {
    case InitialKind::Zero: return SpectralField::zero(g);
    case InitialKind::Gaussian: return gaussian(g, initial.center, initial.width, initial.norm);
    case InitialKind::Mixture: {
      SpectralField f = gaussian_mixture(g, ensemble.seed, initial.id);
      f *= initial.norm;
      return f;
    }
  }
  return SpectralField::zero(g);
}

}  // namespace dklb
