#include "rothe/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "rothe/barenblatt.hpp"
#include "rothe/errors.hpp"

namespace rothe {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"domain", {"dim", "extent", "n", "gamma1", "h0"}},
      {"time", {"T", "N"}},
      {"regularization", {"eps"}},
      {"model", {"preset", "law", "d2", "a", "b", "k1", "k2", "k3", "k4", "d1", "lambda"}},
      {"substrate", {"nu", "D", "v", "h", "S0"}},
      {"initial", {"M0"}},
      {"solver",
       {"tol_newton", "max_iter", "damping", "fallback", "tol_fp", "max_sweeps", "theta_c",
        "mode"}},
      {"output", {"dir", "snapshots"}},
      {"converge", {"oracle", "t0", "C"}},
  };
  return s;
}

std::string canonical_section(const std::string& name) {
  return name == "substrates" ? "substrate" : name;
}

class Reader {
 public:
  Reader(const ConfigSection& sec, const std::string& origin) : sec_(sec), origin_(origin) {}

  [[nodiscard]] bool has(const std::string& key) const { return sec_.entries.count(key) > 0; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const auto it = sec_.entries.find(key);
    const int line = it == sec_.entries.end() ? sec_.line : it->second.line;
    throw ConfigError(origin_ + ":" + std::to_string(line) + ": [" + sec_.name + "] " + key +
                      ": " + what);
  }

  [[nodiscard]] const std::string& raw(const std::string& key) const {
    return sec_.entries.at(key).value;
  }

  [[nodiscard]] std::vector<std::string> words(const std::string& key) const {
    auto w = tokens(raw(key));
    if (w.empty()) fail(key, "empty value");
    return w;
  }

  [[nodiscard]] double number(const std::string& key, const std::string& text) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
      return v;
    } catch (const std::logic_error&) {
      fail(key, "expected a finite number, got '" + text + "'");
    }
  }

  [[nodiscard]] std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    for (const auto& w : words(key)) out.push_back(number(key, w));
    return out;
  }

  void get(const std::string& key, double& out) const {
    if (!has(key)) return;
    const auto v = numbers(key);
    if (v.size() != 1) fail(key, "expected one number");
    out = v[0];
  }

  void get(const std::string& key, int& out) const {
    if (!has(key)) return;
    const auto w = words(key);
    if (w.size() != 1) fail(key, "expected one integer");
    try {
      std::size_t used = 0;
      const long v = std::stol(w[0], &used);
      if (used != w[0].size()) throw std::invalid_argument(w[0]);
      out = static_cast<int>(v);
    } catch (const std::logic_error&) {
      fail(key, "expected an integer, got '" + w[0] + "'");
    }
  }

  void get(const std::string& key, bool& out) const {
    if (!has(key)) return;
    const auto w = words(key);
    if (w.size() == 1 && (w[0] == "true" || w[0] == "yes" || w[0] == "1")) {
      out = true;
    } else if (w.size() == 1 && (w[0] == "false" || w[0] == "no" || w[0] == "0")) {
      out = false;
    } else {
      fail(key, "expected true or false");
    }
  }

  void get(const std::string& key, std::string& out) const {
    if (!has(key)) return;
    const auto w = words(key);
    if (w.size() != 1) fail(key, "expected a single word");
    out = w[0];
  }

  void pair(const std::string& key, std::array<double, 2>& out, int dim) const {
    if (!has(key)) return;
    const auto v = numbers(key);
    if (v.size() == 1) {
      out = {v[0], v[0]};
    } else if (v.size() == 2 && dim == 2) {
      out = {v[0], v[1]};
    } else {
      fail(key, "expected 1 or dim values");
    }
  }

  [[nodiscard]] InitialSpec initial(const std::string& key) const {
    const auto w = words(key);
    InitialSpec s;
    s.kind = w[0];
    static const std::map<std::string, std::pair<std::size_t, std::size_t>> arity{
        {"constant", {1, 1}}, {"step", {3, 3}},   {"bump", {2, 5}},
        {"random", {3, 3}},   {"file", {1, 1}},   {"barenblatt", {0, 1}},
    };
    const auto it = arity.find(s.kind);
    if (it == arity.end()) {
      fail(key, "unknown initial kind '" + s.kind +
                    "' (constant|step|bump|random|file|barenblatt)");
    }
    const std::size_t nargs = w.size() - 1;
    if (nargs < it->second.first || nargs > it->second.second) {
      fail(key, "wrong number of arguments for '" + s.kind + "'");
    }
    s.args.clear();
    if (s.kind == "file") {
      s.path = w[1];
    } else {
      for (std::size_t i = 1; i < w.size(); ++i) s.args.push_back(number(key, w[i]));
    }
    if (s.kind == "random" && (s.args[2] < 0.0 || s.args[2] != std::floor(s.args[2]))) {
      fail(key, "random seed must be a nonnegative integer");
    }
    return s;
  }

 private:
  const ConfigSection& sec_;
  const std::string& origin_;
};

FaceMask parse_gamma1(const Reader& r, int dim) {
  const auto w = r.words("gamma1");
  if (w.size() == 1 && w[0] == "none") return kAllNeumann;
  if (w.size() == 1 && w[0] == "all") {
    FaceMask m = kAllDirichlet;
    if (dim == 1) m[static_cast<int>(Face::Bottom)] = m[static_cast<int>(Face::Top)] = false;
    return m;
  }
  FaceMask m = kAllNeumann;
  std::string joined;
  for (const auto& x : w) joined += x + ",";
  std::istringstream in(joined);
  std::string face;
  while (std::getline(in, face, ',')) {
    face = trim(face);
    if (face.empty()) continue;
    Face f;
    if (face == "left") {
      f = Face::Left;
    } else if (face == "right") {
      f = Face::Right;
    } else if ((face == "bottom" || face == "top") && dim == 2) {
      f = face == "bottom" ? Face::Bottom : Face::Top;
    } else {
      r.fail("gamma1", "unknown face '" + face + "' (none|all|left,right,bottom,top)");
    }
    m[static_cast<int>(f)] = true;
  }
  return m;
}

SubstrateDiffusion parse_substrate_D(const Reader& r) {
  const auto w = r.words("D");
  auto num = [&](std::size_t i) { return r.number("D", w[i]); };
  if (w[0] == "constant" && w.size() == 2) return ConstantDiffusion{num(1)};
  if (w[0] == "power" && (w.size() == 3 || w.size() == 4)) {
    return SubstrateOwnDiffusion{num(1), num(2), w.size() == 4 ? num(3) : 0.0};
  }
  if (w[0] == "switch" && w.size() == 3) return switch_diffusion(num(1), num(2));
  r.fail("D", "expected 'constant v', 'power d p [floor]' or 'switch inside outside'");
}

}  // namespace

std::vector<ConfigSection> parse_config_text(const std::string& text,
                                             const std::string& origin) {
  std::vector<ConfigSection> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      const std::string name = canonical_section(trim(line.substr(1, line.size() - 2)));
      if (!schema().count(name)) fail("unknown section [" + name + "]");
      if (name != "substrate") {
        for (const auto& s : out) {
          if (s.name == name) fail("section [" + name + "] appears twice");
        }
      }
      out.push_back({name, lineno, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    if (out.empty()) fail("key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    ConfigSection& sec = out.back();
    if (!schema().at(sec.name).count(key)) {
      fail("unknown key '" + key + "' in [" + sec.name + "]");
    }
    if (sec.entries.count(key)) fail("duplicate key '" + key + "'");
    if (value.empty()) fail("empty value for '" + key + "'");
    sec.entries[key] = {value, lineno};
  }
  return out;
}

ScenarioConfig parse_config(const std::string& text, const std::string& origin,
                            const std::filesystem::path& base_dir) {
  ScenarioConfig c;
  c.origin = origin;
  c.base_dir = base_dir;
  const auto sections = parse_config_text(text, origin);

  // The dimension governs how other keys are read, so fetch it first.
  for (const auto& sec : sections) {
    if (sec.name != "domain") continue;
    Reader r(sec, origin);
    r.get("dim", c.dim);
    if (c.dim != 1 && c.dim != 2) r.fail("dim", "must be 1 or 2");
  }
  // Model first as well: substrate defaults depend on the preset.
  for (const auto& sec : sections) {
    if (sec.name != "model") continue;
    Reader r(sec, origin);
    r.get("preset", c.preset);
    if (c.preset != "eberl2001" && c.preset != "cellulolytic2017" && c.preset != "pme") {
      r.fail("preset", "unknown preset '" + c.preset + "' (eberl2001|cellulolytic2017|pme)");
    }
    if (c.preset == "pme") c.d2 = 1.0;
    r.get("law", c.law);
    if (!c.law.empty() && c.law != "singular" && c.law != "power") {
      r.fail("law", "expected singular or power");
    }
    r.get("d2", c.d2);
    r.get("a", c.a);
    r.get("b", c.b);
    r.get("k1", c.eberl.k1);
    r.get("k2", c.eberl.k2);
    r.get("k3", c.eberl.k3);
    r.get("k4", c.eberl.k4);
    r.get("d1", c.d1);
    r.get("lambda", c.lambda);
    if (c.preset != "eberl2001") {
      for (const char* k : {"k1", "k2", "k3", "k4", "d1"}) {
        if (r.has(k)) r.fail(k, "only used by preset eberl2001");
      }
    }
    if (c.preset != "cellulolytic2017" && r.has("lambda")) {
      r.fail("lambda", "only used by preset cellulolytic2017");
    }
  }

  for (const auto& sec : sections) {
    Reader r(sec, origin);
    if (sec.name == "domain") {
      if (r.has("extent")) {
        r.pair("extent", c.extent, c.dim);
        if (!(c.extent[0] > 0.0 && c.extent[1] > 0.0)) r.fail("extent", "must be positive");
      }
      if (r.has("n")) {
        const auto v = r.numbers("n");
        if (v.size() == 1 || (v.size() == 2 && c.dim == 2)) {
          for (std::size_t i = 0; i < 2; ++i) {
            const double x = v[std::min(i, v.size() - 1)];
            if (x < 1 || x != std::floor(x)) r.fail("n", "cell counts must be positive integers");
            c.n[i] = static_cast<int>(x);
          }
        } else {
          r.fail("n", "expected 1 or dim values");
        }
      }
      if (r.has("gamma1")) c.gamma1 = parse_gamma1(r, c.dim);
      r.get("h0", c.h0);
    } else if (sec.name == "time") {
      r.get("T", c.T);
      r.get("N", c.N);
      if (!(c.T > 0.0)) r.fail("T", "must be positive");
      if (c.N < 1) r.fail("N", "must be at least 1");
    } else if (sec.name == "regularization") {
      if (r.has("eps")) {
        c.eps = r.numbers("eps");
        try {
          EpsSchedule{c.eps}.validate();
        } catch (const Error& e) {
          r.fail("eps", e.what());
        }
      }
    } else if (sec.name == "substrate") {
      SubstrateConfig s;
      s.nu = c.preset == "eberl2001" ? 1.0 : 0.0;
      s.D = ConstantDiffusion{c.preset == "eberl2001" ? c.d1 : 1.0};
      r.get("nu", s.nu);
      if (s.nu < 0.0) r.fail("nu", "must be nonnegative");
      if (r.has("D")) {
        s.D = parse_substrate_D(r);
        s.D_given = true;
      }
      if (r.has("v")) {
        const auto v = r.numbers("v");
        if (v.size() != static_cast<std::size_t>(c.dim)) r.fail("v", "expected dim components");
        s.v = {v[0], c.dim == 2 ? v[1] : 0.0};
      }
      r.get("h", s.h);
      s.S0.args = {1.0};
      if (r.has("S0")) s.S0 = r.initial("S0");
      if (s.S0.kind == "barenblatt") r.fail("S0", "barenblatt data is only for M0");
      c.substrates.push_back(std::move(s));
    } else if (sec.name == "initial") {
      if (r.has("M0")) c.M0 = r.initial("M0");
    } else if (sec.name == "solver") {
      r.get("tol_newton", c.elliptic.tol_newton);
      r.get("max_iter", c.elliptic.max_iter);
      r.get("damping", c.elliptic.damping);
      r.get("fallback", c.elliptic.fallback);
      r.get("tol_fp", c.coupling.tol_fp);
      r.get("max_sweeps", c.coupling.max_sweeps);
      r.get("theta_c", c.coupling.theta_c);
      if (r.has("mode")) {
        std::string m;
        r.get("mode", m);
        if (m == "banach") {
          c.coupling.mode = CouplingMode::Banach;
        } else if (m == "picard") {
          c.coupling.mode = CouplingMode::Picard;
        } else {
          r.fail("mode", "expected banach or picard");
        }
      }
      try {
        c.elliptic.validate();
        c.coupling.validate();
      } catch (const Error& e) {
        throw ConfigError(origin + ":" + std::to_string(sec.line) + ": [solver] " + e.what());
      }
    } else if (sec.name == "output") {
      if (r.has("dir")) c.out_dir = r.raw("dir");
      r.get("snapshots", c.snapshots);
      if (c.snapshots < 0) r.fail("snapshots", "must be nonnegative");
    } else if (sec.name == "converge") {
      r.get("oracle", c.oracle);
      if (!c.oracle.empty() && c.oracle != "barenblatt" && c.oracle != "self") {
        r.fail("oracle", "expected barenblatt or self");
      }
      r.get("t0", c.oracle_t0);
      r.get("C", c.oracle_C);
      if (!(c.oracle_t0 > 0.0)) r.fail("t0", "must be positive");
      if (c.oracle_C < 0.0) r.fail("C", "must be nonnegative");
    }
  }
  if (c.preset != "pme" && c.substrates.empty()) {
    throw ConfigError(origin + ": preset " + c.preset + " needs at least one [substrate] block");
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string(), path.parent_path());
}

CoefficientLaw ScenarioConfig::make_law() const {
  const std::string kind = law.empty() ? (preset == "pme" ? "power" : "singular") : law;
  try {
    if (kind == "power") return CoefficientLaw(PowerLaw{a});
    return CoefficientLaw(PowerLawSingular{d2, a, b});
  } catch (const Error& e) {
    throw ConfigError(origin + ": [model] " + e.what());
  }
}

Kinetics ScenarioConfig::make_kinetics() const {
  const std::size_t k = substrates.size();
  if (preset == "eberl2001") return eberl2001_kinetics(eberl, k);
  if (preset == "cellulolytic2017") return cellulolytic2017_kinetics(lambda, k);
  return zero_kinetics(k);
}

StructuredGrid ScenarioConfig::make_grid() const {
  return StructuredGrid(dim, {n[0], dim == 2 ? n[1] : 1}, {extent[0], dim == 2 ? extent[1] : 1.0},
                        gamma1);
}

Barenblatt ScenarioConfig::barenblatt() const {
  Barenblatt b;
  b.a = a;
  b.d = dim;
  b.center = {0.5 * extent[0], dim == 2 ? 0.5 * extent[1] : 0.0};
  if (oracle_C > 0.0) {
    b.C = oracle_C;
    return b;
  }
  // Support reaching 40% of the half-width at the final time, peak at most 0.8.
  const double half = 0.5 * (dim == 2 ? std::min(extent[0], extent[1]) : extent[0]);
  b.C = 1.0;
  const double r1 = b.support_radius(oracle_t0 + T);
  b.C = std::pow(0.4 * half / r1, 2.0);
  const double peak = b.peak(oracle_t0);
  if (peak > 0.8) b.C *= std::pow(0.8 / peak, a);
  return b;
}

Field make_initial_field(const InitialSpec& spec, const StructuredGrid& g,
                         const std::filesystem::path& base_dir,
                         const ScenarioConfig* cfg) {
  Field f(g.cells());
  const auto& x = spec.args;
  if (spec.kind == "constant") {
    std::fill(f.begin(), f.end(), x[0]);
  } else if (spec.kind == "step") {
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = g.center(i)[0] < x[2] ? x[0] : x[1];
  } else if (spec.kind == "bump") {
    const double bg = x.size() > 2 ? x[2] : 0.0;
    const double cx = x.size() > 3 ? x[3] : 0.5 * g.extent(0);
    const double cy = x.size() > 4 ? x[4] : 0.5 * g.extent(1);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto c = g.center(i);
      double r2 = (c[0] - cx) * (c[0] - cx);
      if (g.dim() == 2) r2 += (c[1] - cy) * (c[1] - cy);
      f[i] = bg + x[0] * std::max(0.0, 1.0 - r2 / (x[1] * x[1]));
    }
  } else if (spec.kind == "random") {
    std::mt19937_64 rng(static_cast<std::uint64_t>(x[2]));
    std::uniform_real_distribution<double> dist(x[0], x[1]);
    for (auto& v : f) v = dist(rng);
  } else if (spec.kind == "file") {
    const auto path = std::filesystem::path(spec.path).is_absolute() ? std::filesystem::path(spec.path)
                                                                      : base_dir / spec.path;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read initial data file " + path.string());
    Snapshot s;
    try {
      s = read_snapshot(in);
    } catch (const Error& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    if (s.dim != g.dim() || s.n[0] != g.n(0) || s.n[1] != g.n(1)) {
      throw ConfigError(path.string() + ": snapshot grid does not match [domain]");
    }
    f = s.values;
  } else if (spec.kind == "barenblatt") {
    if (cfg == nullptr) throw ConfigError("barenblatt data needs the scenario");
    const double t0 = x.empty() ? cfg->oracle_t0 : x[0];
    f = cfg->barenblatt().sample(g, t0);
  } else {
    throw ConfigError("unknown initial kind " + spec.kind);
  }
  return f;
}

ProblemSpec ScenarioConfig::build_problem() const {
  const StructuredGrid g = make_grid();
  std::vector<SubstrateSpec> subs;
  for (const auto& s : substrates) {
    SubstrateSpec sp;
    sp.nu = s.nu;
    sp.D = s.D;
    sp.v = s.v;
    sp.h = s.h;
    sp.S0 = make_initial_field(s.S0, g, base_dir, this);
    subs.push_back(std::move(sp));
  }
  ProblemSpec spec{g,  make_law(), make_kinetics(), make_initial_field(M0, g, base_dir, this),
                   h0, std::move(subs), T};
  spec.validate();
  return spec;
}

}  // namespace rothe
