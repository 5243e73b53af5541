#include "cvsteady/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "cvsteady/error.hpp"

namespace cvsteady::config {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string fmt_double(double x) { return fmt::format("{:.17g}", x); }

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries)
      : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::optional<std::string> text(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    used_.insert(key);
    return it->second.value;
  }

  template <class T>
  void number(const std::string& key, T& out) {
    if (auto v = text(key)) out = parse_number<T>(key, *v);
  }

  template <class T>
  std::optional<T> optional_number(const std::string& key) {
    if (auto v = text(key)) return parse_number<T>(key, *v);
    return std::nullopt;
  }

  std::vector<double> list(const std::string& key) {
    std::vector<double> out;
    auto v = text(key);
    if (!v) return out;
    std::string_view rest = *v;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = trim(rest.substr(0, comma));
      out.push_back(parse_number<double>(key, std::string(item)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return out;
  }

  void reject_unused() const {
    for (const auto& [key, entry] : entries_) {
      if (!used_.count(key))
        throw ConfigError(key, "line " + std::to_string(entry.line) + ": unknown key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    auto it = entries_.find(key);
    const std::string where =
        it == entries_.end() ? "" : "line " + std::to_string(it->second.line) + ": ";
    throw ConfigError(key, where + msg);
  }

 private:
  template <class T>
  T parse_number(const std::string& key, const std::string& s) const {
    T out{};
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (begin != end && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) fail(key, "malformed number '" + s + "'");
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(out)) fail(key, "value must be finite");
    }
    return out;
  }

  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
};

template <class E>
E parse_enum(Reader& rd, const std::string& key, E current,
             std::initializer_list<std::pair<std::string_view, E>> options) {
  auto v = rd.text(key);
  if (!v) return current;
  for (const auto& [name, value] : options) {
    if (*v == name) return value;
  }
  std::string allowed;
  for (const auto& [name, value] : options) {
    if (!allowed.empty()) allowed += "|";
    allowed += name;
  }
  rd.fail(key, "expected one of " + allowed + ", got '" + *v + "'");
}

const std::initializer_list<std::pair<std::string_view, AxisName>> kAxisNames = {
    {"r", AxisName::R},       {"r1", AxisName::R1},     {"r2", AxisName::R2},
    {"phi1", AxisName::Phi1}, {"phi2", AxisName::Phi2}, {"J", AxisName::J},
    {"T", AxisName::T}};

void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw ConfigError(field, msg);
}

}  // namespace

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Steady: return "steady";
    case Mode::Sweep: return "sweep";
    case Mode::Tc: return "tc";
    case Mode::Labframe: return "labframe";
    case Mode::Oracle: return "oracle";
  }
  return "";
}

std::optional<Mode> parse_mode(std::string_view s) {
  for (Mode m : {Mode::Steady, Mode::Sweep, Mode::Tc, Mode::Labframe, Mode::Oracle}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::string_view to_string(Frame f) {
  return f == Frame::Rotating ? "rotating" : "lab";
}

std::string_view to_string(labframe::Representation r) {
  return r == labframe::Representation::RotatingWithTimeDependentM
             ? "rotating_m"
             : "lab_quadratures";
}

std::string_view to_string(labframe::Criterion c) {
  switch (c) {
    case labframe::Criterion::Mean: return "mean";
    case labframe::Criterion::Min: return "min";
    case labframe::Criterion::Max: return "max";
  }
  return "";
}

std::string_view to_string(labframe::Method m) {
  return m == labframe::Method::Relaxation ? "relaxation" : "fixed_point";
}

std::string_view to_string(AxisName a) {
  for (const auto& [name, value] : kAxisNames) {
    if (value == a) return name;
  }
  return "";
}

std::vector<double> Axis::points() const {
  if (!values.empty()) return values;
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    // Endpoints exact; interior points by linear interpolation.
    out[i] = i == count - 1 ? max : min + (max - min) * i / (count - 1);
  }
  return out;
}

std::size_t SweepGrid::size() const {
  std::size_t n = axes.empty() ? 0 : 1;
  for (const auto& a : axes) n *= a.points().size();
  return n;
}

labframe::FloquetOptions LabConfig::floquet() const {
  labframe::FloquetOptions o;
  o.steps_per_period = steps_per_period;
  o.samples_per_period = samples_per_period;
  o.tolerance = tolerance;
  o.max_periods = max_periods;
  o.method = method;
  return o;
}

SystemParams RunConfig::system() const {
  return SystemParams(omega1, omega2, J, gamma1, gamma2);
}

double RunConfig::nbar(int k) const {
  const BathConfig& b = k == 1 ? bath1 : bath2;
  if (b.nbar) return *b.nbar;
  return thermal_occupation(k == 1 ? omega1 : omega2, temperature);
}

BathSpec RunConfig::bath_spec(int k) const {
  const BathConfig& b = k == 1 ? bath1 : bath2;
  return BathSpec(nbar(k), b.r, b.phi);
}

DerivedBath RunConfig::derived_bath(int k) const {
  const BathConfig& b = k == 1 ? bath1 : bath2;
  if (b.raw) return *b.raw;
  return derive_bath_params(bath_spec(k));
}

void validate(const RunConfig& c) {
  require(c.omega1 > 0.0, "system.omega1", "must be > 0");
  require(c.omega2 > 0.0, "system.omega2", "must be > 0");
  require(c.J >= 0.0, "system.J", "must be >= 0");
  // gamma = 0 passes here and fails later as NotStable.
  require(c.gamma1 >= 0.0, "system.gamma1", "must be >= 0");
  require(c.gamma2 >= 0.0, "system.gamma2", "must be >= 0");
  require(c.temperature >= 0.0, "temperature", "must be >= 0");
  for (int k : {1, 2}) {
    const BathConfig& b = k == 1 ? c.bath1 : c.bath2;
    const std::string prefix = "bath" + std::to_string(k) + ".";
    if (b.nbar) require(*b.nbar >= 0.0, prefix + "nbar", "must be >= 0");
    require(b.r >= 0.0, prefix + "r", "must be >= 0");
    if (b.raw) require(b.raw->N >= 0.0, prefix + "raw.N", "must be >= 0");
  }
  if (c.frame == Frame::Lab)
    require(c.omega1 == c.omega2, "frame",
            "lab frame requires system.omega1 == system.omega2");

  require(c.grid.axes.size() <= 2, "sweep", "at most two axes");
  for (std::size_t i = 0; i < c.grid.axes.size(); ++i) {
    const Axis& a = c.grid.axes[i];
    const std::string prefix = "sweep.axis" + std::to_string(i + 1);
    if (a.values.empty()) {
      require(a.count >= 2, prefix + ".count", "must be >= 2");
      require(a.max > a.min, prefix + ".max", "must be > min");
    }
    if (a.name == AxisName::T) {
      require(!c.bath1.nbar && !c.bath2.nbar, prefix,
              "a temperature axis conflicts with an explicit bath nbar");
      for (double v : a.points()) require(v >= 0.0, prefix, "temperatures must be >= 0");
    }
    if (a.name == AxisName::J) {
      for (double v : a.points()) require(v >= 0.0, prefix, "J values must be >= 0");
    }
    if (a.name == AxisName::R || a.name == AxisName::R1 || a.name == AxisName::R2) {
      for (double v : a.points()) require(v >= 0.0, prefix, "r values must be >= 0");
    }
    if (i == 1)
      require(a.name != c.grid.axes[0].name, prefix, "duplicate axis name");
  }

  require(c.lab.steps_per_period >= 200, "lab.steps_per_period",
          "must be >= 200 (dt <= T_p/200)");
  require(c.lab.samples_per_period >= 64, "lab.samples_per_period", "must be >= 64");
  require(c.lab.steps_per_period % c.lab.samples_per_period == 0,
          "lab.samples_per_period", "must divide lab.steps_per_period");
  require(c.lab.tolerance > 0.0, "lab.tolerance", "must be > 0");
  require(c.lab.max_periods >= 1, "lab.max_periods", "must be >= 1");
  require(c.tc.tolerance > 0.0, "tc.tolerance", "must be > 0");
  require(c.tc.T_max > 0.0, "tc.T_max", "must be > 0");
  require(c.oracle.n_traj >= 2, "oracle.n_traj", "must be >= 2");
  require(c.oracle.t_end >= 0.0, "oracle.t_end", "must be >= 0");
  require(c.oracle.dt >= 0.0, "oracle.dt", "must be >= 0");
  require(c.oracle.threads >= 1, "oracle.threads", "must be >= 1");
}

RunConfig parse(std::string_view text) {
  std::map<std::string, Entry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("", "line " + std::to_string(line_no) +
                                ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty())
      throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
    if (value.empty())
      throw ConfigError(key, "line " + std::to_string(line_no) + ": empty value");
    if (entries.count(key))
      throw ConfigError(key, "line " + std::to_string(line_no) +
                                 ": duplicate key (first on line " +
                                 std::to_string(entries[key].line) + ")");
    entries.emplace(key, Entry{value, line_no});
  }

  Reader rd(std::move(entries));
  RunConfig c;
  rd.number("system.omega1", c.omega1);
  rd.number("system.omega2", c.omega2);
  rd.number("system.J", c.J);
  rd.number("system.gamma1", c.gamma1);
  rd.number("system.gamma2", c.gamma2);
  rd.number("temperature", c.temperature);

  for (int k : {1, 2}) {
    BathConfig& b = k == 1 ? c.bath1 : c.bath2;
    const std::string prefix = "bath" + std::to_string(k) + ".";
    b.nbar = rd.optional_number<double>(prefix + "nbar");
    rd.number(prefix + "r", b.r);
    rd.number(prefix + "phi", b.phi);
    const auto N = rd.optional_number<double>(prefix + "raw.N");
    const auto re = rd.optional_number<double>(prefix + "raw.M_re");
    const auto im = rd.optional_number<double>(prefix + "raw.M_im");
    if (N || re || im) {
      if (!N) rd.fail(prefix + "raw.M_re", "raw override requires " + prefix + "raw.N");
      b.raw = DerivedBath{*N, {re.value_or(0.0), im.value_or(0.0)}};
    }
  }

  c.frame = parse_enum(rd, "frame", c.frame,
                       {{"rotating", Frame::Rotating}, {"lab", Frame::Lab}});
  rd.number("seed", c.seed);

  for (int i : {1, 2}) {
    const std::string prefix = "sweep.axis" + std::to_string(i);
    const bool any = rd.has(prefix) || rd.has(prefix + ".min") ||
                     rd.has(prefix + ".max") || rd.has(prefix + ".count") ||
                     rd.has(prefix + ".values");
    if (!any) continue;
    if (!rd.has(prefix)) rd.fail(prefix + ".min", "missing axis name " + prefix);
    if (i == 2 && c.grid.axes.empty())
      rd.fail(prefix, "sweep.axis2 given without sweep.axis1");
    Axis a;
    a.name = parse_enum(rd, prefix, AxisName::R, kAxisNames);
    a.values = rd.list(prefix + ".values");
    if (a.values.empty()) {
      for (const char* part : {".min", ".max", ".count"}) {
        if (!rd.has(prefix + part)) rd.fail(prefix, std::string("missing ") + prefix + part);
      }
      rd.number(prefix + ".min", a.min);
      rd.number(prefix + ".max", a.max);
      rd.number(prefix + ".count", a.count);
    } else if (rd.has(prefix + ".min") || rd.has(prefix + ".max") ||
               rd.has(prefix + ".count")) {
      rd.fail(prefix + ".values", "give either values or min/max/count, not both");
    }
    c.grid.axes.push_back(a);
  }

  c.lab.representation = parse_enum(
      rd, "lab.representation", c.lab.representation,
      {{"rotating_m", labframe::Representation::RotatingWithTimeDependentM},
       {"lab_quadratures", labframe::Representation::LabQuadratures}});
  c.lab.method = parse_enum(rd, "lab.method", c.lab.method,
                            {{"relaxation", labframe::Method::Relaxation},
                             {"fixed_point", labframe::Method::FixedPoint}});
  c.lab.criterion = parse_enum(rd, "lab.criterion", c.lab.criterion,
                               {{"mean", labframe::Criterion::Mean},
                                {"min", labframe::Criterion::Min},
                                {"max", labframe::Criterion::Max}});
  rd.number("lab.steps_per_period", c.lab.steps_per_period);
  rd.number("lab.samples_per_period", c.lab.samples_per_period);
  rd.number("lab.tolerance", c.lab.tolerance);
  rd.number("lab.max_periods", c.lab.max_periods);

  rd.number("tc.tolerance", c.tc.tolerance);
  rd.number("tc.T_max", c.tc.T_max);

  rd.number("oracle.n_traj", c.oracle.n_traj);
  rd.number("oracle.t_end", c.oracle.t_end);
  rd.number("oracle.dt", c.oracle.dt);
  rd.number("oracle.threads", c.oracle.threads);

  rd.reject_unused();
  validate(c);
  return c;
}

RunConfig load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string serialize(const RunConfig& c) {
  std::string out;
  auto put = [&](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  put("system.omega1", fmt_double(c.omega1));
  put("system.omega2", fmt_double(c.omega2));
  put("system.J", fmt_double(c.J));
  put("system.gamma1", fmt_double(c.gamma1));
  put("system.gamma2", fmt_double(c.gamma2));
  put("temperature", fmt_double(c.temperature));
  for (int k : {1, 2}) {
    const BathConfig& b = k == 1 ? c.bath1 : c.bath2;
    const std::string prefix = "bath" + std::to_string(k) + ".";
    if (b.nbar) put(prefix + "nbar", fmt_double(*b.nbar));
    put(prefix + "r", fmt_double(b.r));
    put(prefix + "phi", fmt_double(b.phi));
    if (b.raw) {
      put(prefix + "raw.N", fmt_double(b.raw->N));
      put(prefix + "raw.M_re", fmt_double(b.raw->M.real()));
      put(prefix + "raw.M_im", fmt_double(b.raw->M.imag()));
    }
  }
  put("frame", std::string(to_string(c.frame)));
  put("seed", std::to_string(c.seed));
  for (std::size_t i = 0; i < c.grid.axes.size(); ++i) {
    const Axis& a = c.grid.axes[i];
    const std::string prefix = "sweep.axis" + std::to_string(i + 1);
    put(prefix, std::string(to_string(a.name)));
    if (!a.values.empty()) {
      std::string list;
      for (double v : a.values) {
        if (!list.empty()) list += ", ";
        list += fmt_double(v);
      }
      put(prefix + ".values", list);
    } else {
      put(prefix + ".min", fmt_double(a.min));
      put(prefix + ".max", fmt_double(a.max));
      put(prefix + ".count", std::to_string(a.count));
    }
  }
  put("lab.representation", std::string(to_string(c.lab.representation)));
  put("lab.method", std::string(to_string(c.lab.method)));
  put("lab.criterion", std::string(to_string(c.lab.criterion)));
  put("lab.steps_per_period", std::to_string(c.lab.steps_per_period));
  put("lab.samples_per_period", std::to_string(c.lab.samples_per_period));
  put("lab.tolerance", fmt_double(c.lab.tolerance));
  put("lab.max_periods", std::to_string(c.lab.max_periods));
  put("tc.tolerance", fmt_double(c.tc.tolerance));
  put("tc.T_max", fmt_double(c.tc.T_max));
  put("oracle.n_traj", std::to_string(c.oracle.n_traj));
  put("oracle.t_end", fmt_double(c.oracle.t_end));
  put("oracle.dt", fmt_double(c.oracle.dt));
  put("oracle.threads", std::to_string(c.oracle.threads));
  return out;
}

RunConfig with_axis_value(const RunConfig& c, AxisName axis, double value) {
  RunConfig out = c;
  switch (axis) {
    case AxisName::R:
      out.bath1.r = value;
      out.bath2.r = value;
      break;
    case AxisName::R1: out.bath1.r = value; break;
    case AxisName::R2: out.bath2.r = value; break;
    case AxisName::Phi1: out.bath1.phi = value; break;
    case AxisName::Phi2: out.bath2.phi = value; break;
    case AxisName::J: out.J = value; break;
    case AxisName::T: out.temperature = value; break;
  }
  return out;
}

}  // namespace cvsteady::config
