#include "rhlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "rhlab/errors.hpp"

namespace rhlab {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"run", {"seed", "eigenpairs", "eigen_index"}},
      {"domain", {"dimension", "shape", "lower", "upper", "center", "radius", "nodes_per_axis", "spacing"}},
      {"coefficient", {"kind", "entries", "matrix", "amplitude"}},
      {"potential", {"kind", "amplitude", "center", "exponent", "value", "depth", "radius"}},
      {"mc", {"alpha", "r", "rho_min", "rho_max", "center_stride", "radii_per_octave"}},
      {"solver", {"tolerance", "max_iterations", "shift", "linear_tolerance", "max_linear_iterations"}},
      {"queries", {"pairs", "p", "q"}},
      {"moser", {"enabled", "p", "levels"}},
      {"calibration",
       {"cn", "estimate", "source", "file", "safety_factor", "r", "bank_size", "nodes_per_axis", "half_width"}},
      {"output", {"eigen_csv"}},
  };
  return keys;
}

// Order of a potential section: "potential" is 1, "potentialK" is K.
std::optional<int> potential_order(const std::string& section) {
  if (section.rfind("potential", 0) != 0) return std::nullopt;
  const std::string suffix = section.substr(9);
  if (suffix.empty()) return 1;
  int k = 0;
  const auto [ptr, ec] = std::from_chars(suffix.data(), suffix.data() + suffix.size(), k);
  if (ec != std::errc() || ptr != suffix.data() + suffix.size() || k < 1) return std::nullopt;
  return k;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

double parse_double(const std::string& text, const std::string& where) {
  const std::string s = trim(text);
  if (s == "inf" || s == "infinity" || s == "+inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* first = s.data() + (s.size() > 1 && s[0] == '+' ? 1 : 0);
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(where + ": expected a number, got '" + s + "'");
  }
  return v;
}

long long parse_integer(const std::string& text, const std::string& where) {
  const std::string s = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(where + ": expected an integer, got '" + s + "'");
  }
  return v;
}

bool parse_bool(const std::string& text, const std::string& where) {
  const std::string s = trim(text);
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw ConfigError(where + ": expected true or false, got '" + s + "'");
}

class Section {
 public:
  Section(std::string name, const pt::ptree& tree) : name_(std::move(name)), tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) const {
    const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }
  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

  void get(const std::string& key, double& out) const {
    if (auto v = raw(key)) out = parse_double(*v, where(key));
  }
  void get(const std::string& key, int& out) const {
    if (auto v = raw(key)) {
      const long long x = parse_integer(*v, where(key));
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        throw ConfigError(where(key) + ": out of range");
      }
      out = static_cast<int>(x);
    }
  }
  void get(const std::string& key, bool& out) const {
    if (auto v = raw(key)) out = parse_bool(*v, where(key));
  }
  void get(const std::string& key, std::string& out) const {
    if (auto v = raw(key)) out = *v;
  }
  void get(const std::string& key, std::optional<double>& out) const {
    if (auto v = raw(key)) out = parse_double(*v, where(key));
  }
  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    if (auto v = raw(key)) {
      for (const auto& tok : split_list(*v)) out.push_back(parse_double(tok, where(key)));
    }
    return out;
  }
  void get_point(const std::string& key, Point& out, int dim) const {
    if (!raw(key)) return;
    const auto v = list(key);
    if (static_cast<int>(v.size()) != dim) {
      throw ConfigError(where(key) + ": expected " + std::to_string(dim) + " coordinates");
    }
    out = Point{};
    for (int d = 0; d < dim; ++d) out[d] = v[static_cast<std::size_t>(d)];
  }

 private:
  std::string name_;
  const pt::ptree& tree_;
};

void load_calibration_file(CalibrationConfig& cal, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("calibration file not found: " + file.string());
  nlohmann::json j;
  try {
    in >> j;
    cal.cn = j.at("value").get<double>();
    if (j.contains("estimate")) cal.estimate = j.at("estimate").get<double>();
    if (j.contains("safety_factor")) cal.safety_factor = j.at("safety_factor").get<double>();
    if (j.contains("r")) cal.r = j.at("r").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed calibration file " + file.string() + ": " + e.what());
  }
  cal.source = file.lexically_normal().string();
}

NormQuery parse_pair(const std::string& token) {
  const auto colon = token.find(':');
  if (colon == std::string::npos) throw ConfigError("[queries] pairs: expected p:q, got '" + token + "'");
  return {parse_double(token.substr(0, colon), "[queries] pairs"),
          parse_double(token.substr(colon + 1), "[queries] pairs")};
}

void write_point(std::ostream& out, const char* key, const Point& p, int dim) {
  out << key << " =";
  for (int d = 0; d < dim; ++d) out << ' ' << format_number(p[d]);
  out << '\n';
}

}  // namespace

std::optional<Command> parse_command(const std::string& name) {
  static const std::map<std::string, Command> names = {
      {"run", Command::run},         {"solve", Command::solve},           {"mc-norm", Command::mc_norm},
      {"fp-calibrate", Command::fp_calibrate}, {"verify", Command::verify}, {"moser", Command::moser},
      {"payne-rayner", Command::payne_rayner}};
  const auto it = names.find(name);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

const char* to_string(Command command) {
  switch (command) {
    case Command::run:
      return "run";
    case Command::solve:
      return "solve";
    case Command::mc_norm:
      return "mc-norm";
    case Command::fp_calibrate:
      return "fp-calibrate";
    case Command::verify:
      return "verify";
    case Command::moser:
      return "moser";
    case Command::payne_rayner:
      return "payne-rayner";
  }
  return "unknown";
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  std::map<int, const pt::ptree*> potential_sections;
  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty()) throw ConfigError("key '" + name + "' outside a section");
    const auto order = potential_order(name);
    const std::string kind = order ? "potential" : name;
    const auto it = allowed_keys().find(kind);
    if (it == allowed_keys().end()) throw ConfigError("unknown section [" + name + "]");
    for (const auto& [key, value] : section) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + name + "]");
    }
    if (order && !potential_sections.emplace(*order, &section).second) {
      throw ConfigError("potential section [" + name + "] repeats an earlier order");
    }
  }
  auto section = [&](const char* name) {
    static const pt::ptree empty;
    const auto child = tree.get_child_optional(pt::ptree::path_type(name, '\0'));
    return Section(name, child ? *child : empty);
  };

  RunConfig c;
  const Section run = section("run");
  if (auto v = run.raw("seed")) {
    const long long s = parse_integer(*v, run.where("seed"));
    if (s < 0) throw ConfigError("[run] seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  run.get("eigenpairs", c.eigenpairs);
  run.get("eigen_index", c.eigen_index);

  const Section dom = section("domain");
  dom.get("dimension", c.domain.dimension);
  const int dim = c.domain.dimension;
  if (dim != 2 && dim != 3) throw ConfigError("[domain] dimension must be 2 or 3");
  dom.get("shape", c.domain.shape);
  dom.get_point("center", c.domain.center, dim);
  dom.get("radius", c.domain.radius);
  if (c.domain.shape == "ball") {
    for (int d = 0; d < dim; ++d) {
      c.domain.lower[d] = c.domain.center[d] - c.domain.radius;
      c.domain.upper[d] = c.domain.center[d] + c.domain.radius;
    }
  } else if (c.domain.shape == "box") {
    if (!dom.raw("lower") || !dom.raw("upper")) throw ConfigError("[domain] a box needs lower and upper");
  } else {
    throw ConfigError("[domain] shape must be box or ball");
  }
  dom.get_point("lower", c.domain.lower, dim);
  dom.get_point("upper", c.domain.upper, dim);
  dom.get("nodes_per_axis", c.domain.nodes_per_axis);
  if (auto v = dom.raw("spacing")) {
    if (dom.raw("nodes_per_axis")) throw ConfigError("[domain] give nodes_per_axis or spacing, not both");
    const double h = parse_double(*v, dom.where("spacing"));
    if (!(h > 0.0)) throw ConfigError("[domain] spacing must be positive");
    int nodes = 0;
    for (int d = 0; d < dim; ++d) {
      const double cells = (c.domain.upper[d] - c.domain.lower[d]) / h;
      const double rounded = std::round(cells);
      if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
        throw ConfigError("[domain] spacing does not divide the extent");
      }
      const int n = static_cast<int>(rounded) + 1;
      if (d > 0 && n != nodes) throw ConfigError("[domain] spacing gives different node counts per axis");
      nodes = n;
    }
    c.domain.nodes_per_axis = nodes;
  }
  if (c.domain.nodes_per_axis == 0) throw ConfigError("[domain] needs nodes_per_axis or spacing");

  const Section coef = section("coefficient");
  coef.get("kind", c.coefficient.kind);
  coef.get_point("entries", c.coefficient.entries, dim);
  coef.get("amplitude", c.coefficient.amplitude);
  if (coef.raw("matrix")) {
    const auto m = coef.list("matrix");
    if (static_cast<int>(m.size()) != dim * dim) throw ConfigError("[coefficient] matrix needs n*n entries");
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) c.coefficient.matrix[i][j] = m[static_cast<std::size_t>(i * dim + j)];
    }
  }

  for (const auto& [order, tree_ptr] : potential_sections) {
    const std::string name = order == 1 ? "potential" : "potential" + std::to_string(order);
    const Section s(name, *tree_ptr);
    PotentialTermConfig t;
    s.get("kind", t.kind);
    s.get("amplitude", t.amplitude);
    s.get_point("center", t.center, dim);
    s.get("exponent", t.exponent);
    s.get("value", t.value);
    s.get("depth", t.depth);
    s.get("radius", t.radius);
    c.potential.push_back(t);
  }

  const Section mc = section("mc");
  mc.get("alpha", c.mc.alpha);
  mc.get("r", c.mc.r);
  mc.get("rho_min", c.mc.rho_min);
  mc.get("rho_max", c.mc.rho_max);
  mc.get("center_stride", c.mc.center_stride);
  mc.get("radii_per_octave", c.mc.radii_per_octave);

  const Section sol = section("solver");
  sol.get("tolerance", c.solver.tolerance);
  sol.get("max_iterations", c.solver.max_iterations);
  sol.get("shift", c.solver.shift);
  sol.get("linear_tolerance", c.solver.linear_tolerance);
  sol.get("max_linear_iterations", c.solver.max_linear_iterations);

  const Section q = section("queries");
  if (auto pairs = q.raw("pairs")) {
    if (q.raw("p") || q.raw("q")) throw ConfigError("[queries] give pairs or p and q, not both");
    for (const auto& tok : split_list(*pairs)) c.queries.push_back(parse_pair(tok));
  } else if (q.raw("p") || q.raw("q")) {
    // Grid form: every (p, q) with q >= p.
    for (double p : q.list("p")) {
      for (double qq : q.list("q")) {
        if (qq >= p) c.queries.push_back({p, qq});
      }
    }
  }

  const Section mo = section("moser");
  c.moser.enabled = tree.get_child_optional(pt::ptree::path_type("moser", '\0')).has_value();
  mo.get("enabled", c.moser.enabled);
  mo.get("p", c.moser.p);
  mo.get("levels", c.moser.levels);

  const Section cal = section("calibration");
  if (auto file = cal.raw("file")) {
    if (cal.raw("cn")) throw ConfigError("[calibration] give cn or file, not both");
    std::filesystem::path p(*file);
    if (p.is_relative()) p = base_dir / p;
    load_calibration_file(c.calibration, p);
  }
  cal.get("cn", c.calibration.cn);
  cal.get("estimate", c.calibration.estimate);
  cal.get("source", c.calibration.source);
  cal.get("safety_factor", c.calibration.safety_factor);
  cal.get("r", c.calibration.r);
  cal.get("bank_size", c.calibration.bank_size);
  cal.get("nodes_per_axis", c.calibration.nodes_per_axis);
  cal.get("half_width", c.calibration.half_width);

  section("output").get("eigen_csv", c.eigen_csv);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      text = nlohmann::json::parse(text).at("config").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("report " + path.string() + " has no embedded config: " + e.what());
    }
  }
  return parse_config(text, path.parent_path());
}

std::string serialize(const RunConfig& c) {
  const int dim = c.domain.dimension;
  std::ostringstream out;
  out << "[run]\n";
  out << "seed = " << c.seed << '\n';
  out << "eigenpairs = " << c.eigenpairs << '\n';
  out << "eigen_index = " << c.eigen_index << '\n';

  out << "\n[domain]\n";
  out << "dimension = " << dim << '\n';
  out << "shape = " << c.domain.shape << '\n';
  write_point(out, "lower", c.domain.lower, dim);
  write_point(out, "upper", c.domain.upper, dim);
  if (c.domain.shape == "ball") {
    write_point(out, "center", c.domain.center, dim);
    out << "radius = " << format_number(c.domain.radius) << '\n';
  }
  out << "nodes_per_axis = " << c.domain.nodes_per_axis << '\n';

  out << "\n[coefficient]\n";
  out << "kind = " << c.coefficient.kind << '\n';
  if (c.coefficient.kind == "diagonal") write_point(out, "entries", c.coefficient.entries, dim);
  if (c.coefficient.kind == "constant") {
    out << "matrix =";
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) out << ' ' << format_number(c.coefficient.matrix[i][j]);
    }
    out << '\n';
  }
  if (c.coefficient.kind == "shear" || c.coefficient.kind == "rotation") {
    out << "amplitude = " << format_number(c.coefficient.amplitude) << '\n';
  }

  for (std::size_t k = 0; k < c.potential.size(); ++k) {
    const PotentialTermConfig& t = c.potential[k];
    out << "\n[potential" << (k == 0 ? std::string() : std::to_string(k + 1)) << "]\n";
    out << "kind = " << t.kind << '\n';
    if (t.kind == "power_law") {
      out << "amplitude = " << format_number(t.amplitude) << '\n';
      write_point(out, "center", t.center, dim);
      out << "exponent = " << format_number(t.exponent) << '\n';
    } else if (t.kind == "constant") {
      out << "value = " << format_number(t.value) << '\n';
    } else if (t.kind == "ball_well") {
      out << "depth = " << format_number(t.depth) << '\n';
      write_point(out, "center", t.center, dim);
      out << "radius = " << format_number(t.radius) << '\n';
    }
  }

  out << "\n[mc]\n";
  out << "alpha = " << format_number(c.mc.alpha) << '\n';
  out << "r = " << format_number(c.mc.r) << '\n';
  out << "rho_min = " << format_number(c.mc.rho_min) << '\n';
  out << "rho_max = " << format_number(c.mc.rho_max) << '\n';
  out << "center_stride = " << c.mc.center_stride << '\n';
  out << "radii_per_octave = " << c.mc.radii_per_octave << '\n';

  out << "\n[solver]\n";
  out << "tolerance = " << format_number(c.solver.tolerance) << '\n';
  out << "max_iterations = " << c.solver.max_iterations << '\n';
  if (c.solver.shift) out << "shift = " << format_number(*c.solver.shift) << '\n';
  out << "linear_tolerance = " << format_number(c.solver.linear_tolerance) << '\n';
  out << "max_linear_iterations = " << c.solver.max_linear_iterations << '\n';

  out << "\n[queries]\n";
  out << "pairs =";
  for (const auto& q : c.queries) out << ' ' << format_number(q.p) << ':' << format_number(q.q);
  out << '\n';

  out << "\n[moser]\n";
  out << "enabled = " << (c.moser.enabled ? "true" : "false") << '\n';
  out << "p = " << format_number(c.moser.p) << '\n';
  out << "levels = " << c.moser.levels << '\n';

  out << "\n[calibration]\n";
  if (c.calibration.cn) out << "cn = " << format_number(*c.calibration.cn) << '\n';
  if (c.calibration.estimate) out << "estimate = " << format_number(*c.calibration.estimate) << '\n';
  if (!c.calibration.source.empty()) out << "source = " << c.calibration.source << '\n';
  out << "safety_factor = " << format_number(c.calibration.safety_factor) << '\n';
  out << "r = " << format_number(c.calibration.r) << '\n';
  out << "bank_size = " << c.calibration.bank_size << '\n';
  out << "nodes_per_axis = " << c.calibration.nodes_per_axis << '\n';
  out << "half_width = " << format_number(c.calibration.half_width) << '\n';

  out << "\n[output]\n";
  out << "eigen_csv = " << (c.eigen_csv ? "true" : "false") << '\n';
  return out.str();
}

void validate(const RunConfig& c, Command command) {
  const int dim = c.domain.dimension;
  if (c.domain.nodes_per_axis < 3) throw ConfigError("[domain] needs at least 3 nodes per axis");
  for (int d = 0; d < dim; ++d) {
    if (!(c.domain.upper[d] > c.domain.lower[d])) throw ConfigError("[domain] upper must exceed lower on every axis");
  }
  if (c.domain.shape == "ball" && !(c.domain.radius > 0.0)) {
    throw DegenerateInputError("[domain] ball radius must be positive");
  }
  static const std::set<std::string> coefficient_kinds = {"identity", "diagonal", "constant", "shear", "rotation"};
  if (!coefficient_kinds.count(c.coefficient.kind)) throw ConfigError("[coefficient] unknown kind");
  static const std::set<std::string> potential_kinds = {"zero", "constant", "power_law", "ball_well"};
  for (const auto& t : c.potential) {
    if (!potential_kinds.count(t.kind)) throw ConfigError("[potential] unknown kind '" + t.kind + "'");
  }
  if (c.eigenpairs < 1 || c.eigenpairs > 5) throw ConfigError("[run] eigenpairs must lie in [1, 5]");
  if (c.eigen_index < 0 || c.eigen_index >= c.eigenpairs) {
    throw ConfigError("[run] eigen_index must be below eigenpairs");
  }
  validate(c.solver);
  if (!(c.mc.alpha > 0.0 && c.mc.alpha <= 2.0) || !(c.mc.r >= 1.0)) {
    throw ConfigError("[mc] needs 0 < alpha <= 2 and r >= 1");
  }
  if (c.mc.rho_min < 0.0 || c.mc.rho_max < 0.0 || c.mc.center_stride < 0 || c.mc.radii_per_octave < 1) {
    throw ConfigError("[mc] search controls out of range");
  }
  for (const auto& q : c.queries) {
    if (!(q.p > 0.0)) throw ConfigError("[queries] p must be positive");
    if (!(q.q >= q.p)) {
      throw ConfigError("[queries] q must be at least p, got p = " + format_number(q.p) +
                        ", q = " + format_number(q.q));
    }
  }
  const auto& cal = c.calibration;
  if (cal.cn && !(*cal.cn >= 0.0)) throw ConfigError("[calibration] cn must be nonnegative");
  if (!(cal.safety_factor >= 1.0)) throw ConfigError("[calibration] safety_factor must be at least 1");
  if (cal.bank_size < 1) throw ConfigError("[calibration] bank_size must be positive");
  if (cal.nodes_per_axis < 5 || !(cal.half_width > 0.0)) {
    throw ConfigError("[calibration] grid needs at least 5 nodes per axis and a positive half width");
  }

  const bool needs_ladder = command == Command::moser || (command == Command::run && c.moser.enabled && dim >= 3);
  if (needs_ladder) {
    if (c.moser.levels < 1) throw ConfigError("[moser] levels must be at least 1");
    if (!(c.moser.p >= 2.0)) {
      throw HypothesisError(
          "[moser] p = " + format_number(c.moser.p) +
          " rejected: the ladder starts at tau = p >= 2; exponents p < 2 are covered by the p = 2 bound through "
          "the max{p,2} factor, not by iterating");
    }
  }
  if ((command == Command::verify || command == Command::moser) && dim < 3) {
    throw ConfigError("verification needs n >= 3 (omega = n/(n-2))");
  }
  if (command == Command::fp_calibrate && !(cal.r > 1.0)) {
    throw HypothesisError("[calibration] r must exceed 1; the Fefferman-Phong inequality fails at r = 1");
  }
  if (command == Command::payne_rayner) {
    if (dim != 2) throw ConfigError("payne-rayner needs a planar domain");
    if (c.coefficient.kind != "identity") throw ConfigError("payne-rayner needs the identity coefficient");
    for (const auto& t : c.potential) {
      if (t.kind != "zero") throw ConfigError("payne-rayner needs V = 0");
    }
  }
}

Grid make_grid(const RunConfig& c) {
  const int dim = c.domain.dimension;
  std::vector<double> extents, origin;
  for (int d = 0; d < dim; ++d) {
    extents.push_back(c.domain.upper[d] - c.domain.lower[d]);
    origin.push_back(c.domain.lower[d]);
  }
  return build_grid(dim, extents, c.domain.nodes_per_axis, origin);
}

DomainShape make_shape(const RunConfig& c) {
  if (c.domain.shape == "ball") return DomainShape::ball(c.domain.center, c.domain.radius);
  return DomainShape::box(c.domain.lower, c.domain.upper);
}

CoefficientField make_coefficient(const RunConfig& c) {
  const auto& k = c.coefficient.kind;
  if (k == "diagonal") return CoefficientField::diagonal_matrix(c.coefficient.entries);
  if (k == "constant") return CoefficientField::constant_matrix(c.coefficient.matrix);
  if (k == "shear") return CoefficientField::shear(c.coefficient.amplitude);
  if (k == "rotation") return CoefficientField::rotation(c.coefficient.amplitude);
  return CoefficientField::identity();
}

PotentialSpec make_potential(const RunConfig& c, const Grid& grid) {
  PotentialSum sum;
  for (const auto& t : c.potential) {
    if (t.kind == "power_law") {
      sum.terms.push_back(PowerLaw{t.amplitude, t.center, t.exponent});
    } else if (t.kind == "constant") {
      sum.terms.push_back(Constant{t.value});
    } else if (t.kind == "ball_well") {
      sum.terms.push_back(BallWell{t.depth, t.center, t.radius});
    }
  }
  PotentialSpec spec = sum.terms.empty() ? PotentialSpec(Constant{0.0})
                       : sum.terms.size() == 1 ? sum.terms.front()
                                               : PotentialSpec(sum);
  validate(spec);
  return offset_singular_centers(spec, grid);
}

}  // namespace rhlab
