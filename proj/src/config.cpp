#include "qwalk/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "qwalk/serialize.hpp"

namespace qwalk::cli {

ConfigError::ConfigError(int line, const std::string& message)
    : ValidationError(line > 0 ? "config line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "lattice.kind", "lattice.n",     "lattice.m",      "lattice.boundary", "coin.kind",
      "coin.alpha",   "coin.beta",     "coin.gamma",     "coin.matrix",      "reflection.kind",
      "reflection.matrix", "p",        "command",        "steps",            "shots",
      "seed",         "threads",       "record_every",   "initial",          "engine",
      "output",       "format",        "site"};
  return keys;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

long long parse_integer(const std::string& key, const std::string& value, int line) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(value, &used);
    if (used == value.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(line, key + ": expected an integer, got '" + value + "'");
}

double parse_real(const std::string& key, const std::string& value, int line) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used == value.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(line, key + ": expected a decimal number, got '" + value + "'");
}

io::Json parse_json(const std::string& key, const std::string& value, int line) {
  try {
    return io::Json::parse(value);
  } catch (const io::Json::exception&) {
    throw ConfigError(line, key + ": malformed list '" + value + "'");
  }
}

void expect_one_of(const std::string& key, const std::string& value,
                   std::initializer_list<const char*> options, int line) {
  for (const char* o : options) {
    if (value == o) return;
  }
  std::string msg = key + ": '" + value + "' is not one of";
  for (const char* o : options) msg += std::string(" ") + o;
  throw ConfigError(line, msg);
}

int line_of(const RunConfig& c, const std::string& key) {
  const auto it = c.key_lines.find(key);
  return it == c.key_lines.end() ? 0 : it->second;
}

void assign(RunConfig& c, const std::string& key, const std::string& value, int line) {
  if (key == "lattice.kind") {
    expect_one_of(key, value, {"line", "cycle", "grid"}, line);
    c.lattice_kind = value;
  } else if (key == "lattice.n") {
    c.n = static_cast<int>(parse_integer(key, value, line));
  } else if (key == "lattice.m") {
    c.m = static_cast<int>(parse_integer(key, value, line));
  } else if (key == "lattice.boundary") {
    expect_one_of(key, value, {"carpet", "torus"}, line);
    c.boundary = value;
  } else if (key == "coin.kind") {
    expect_one_of(key, value, {"su2", "grover", "custom"}, line);
    c.coin_kind = value;
  } else if (key == "coin.alpha") {
    c.alpha = parse_real(key, value, line);
  } else if (key == "coin.beta") {
    c.beta = parse_real(key, value, line);
  } else if (key == "coin.gamma") {
    c.gamma = parse_real(key, value, line);
  } else if (key == "coin.matrix" || key == "reflection.matrix") {
    Matrix m;
    try {
      m = io::matrix_from_json(parse_json(key, value, line));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(line, key + ": " + e.what());
    }
    (key == "coin.matrix" ? c.coin_matrix : c.reflection_matrix) = std::move(m);
  } else if (key == "reflection.kind") {
    expect_one_of(key, value, {"default", "custom"}, line);
    c.reflection_kind = value;
  } else if (key == "p") {
    if (!value.empty() && value.front() == '[') {
      const io::Json j = parse_json(key, value, line);
      c.p.clear();
      for (const auto& x : j) {
        if (!x.is_number()) throw ConfigError(line, "p: list entries must be numbers");
        c.p.push_back(x.get<double>());
      }
    } else {
      c.p = {parse_real(key, value, line)};
    }
    for (double x : c.p) {
      if (!(x >= 0.0 && x <= 1.0)) throw ConfigError(line, "p: probabilities must lie in [0, 1]");
    }
  } else if (key == "command") {
    expect_one_of(key, value,
                  {"evolve", "attractors", "asymptotic", "edge-states", "grover-demo", "verify"},
                  line);
    c.command = value;
  } else if (key == "steps") {
    c.steps = static_cast<int>(parse_integer(key, value, line));
    if (c.steps < 0) throw ConfigError(line, "steps must be non-negative");
  } else if (key == "shots") {
    c.shots = static_cast<int>(parse_integer(key, value, line));
    if (c.shots < 1) throw ConfigError(line, "shots must be at least 1");
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(parse_integer(key, value, line));
  } else if (key == "threads") {
    c.threads = static_cast<int>(parse_integer(key, value, line));
    if (c.threads < 1) throw ConfigError(line, "threads must be at least 1");
  } else if (key == "record_every") {
    c.record_every = static_cast<int>(parse_integer(key, value, line));
    if (c.record_every < 1) throw ConfigError(line, "record_every must be at least 1");
  } else if (key == "initial") {
    c.initial = value;
  } else if (key == "engine") {
    expect_one_of(key, value, {"exact", "montecarlo"}, line);
    c.engine = value;
  } else if (key == "output") {
    c.output = value;
  } else if (key == "format") {
    expect_one_of(key, value, {"json", "csv"}, line);
    c.format = value;
  } else if (key == "site") {
    c.site = value;
  }
}

}  // namespace

void rebuild_model(RunConfig& c) {
  c.model.reset();
  if (c.lattice_kind.empty()) throw ConfigError(0, "missing required key lattice.kind");
  if (c.coin_kind.empty()) throw ConfigError(0, "missing required key coin.kind");

  auto build_lattice = [&]() -> Lattice {
    try {
      if (c.lattice_kind == "line") return Lattice::line(c.n);
      if (c.lattice_kind == "cycle") return Lattice::cycle(c.n);
      return Lattice::grid(c.m, c.n, c.boundary == "torus" ? Boundary::Torus : Boundary::Carpet);
    } catch (const Error& e) {
      const int line = c.key_lines.count("lattice.n") ? line_of(c, "lattice.n") : line_of(c, "lattice.kind");
      throw ConfigError(line, std::string("lattice: ") + e.what());
    }
  };
  const Lattice lattice = build_lattice();

  CoinSpec coin;
  if (c.coin_kind == "su2") {
    coin = SU2Coin{c.alpha, c.beta, c.gamma};
  } else if (c.coin_kind == "grover") {
    coin = GroverCoin{};
  } else {
    if (!c.coin_matrix) throw ConfigError(line_of(c, "coin.kind"), "custom coin requires coin.matrix");
    coin = CustomCoin{*c.coin_matrix};
  }
  ReflectionSpec reflection = DefaultReflection{};
  if (c.reflection_kind == "custom") {
    if (!c.reflection_matrix) {
      throw ConfigError(line_of(c, "reflection.kind"), "custom reflection requires reflection.matrix");
    }
    reflection = CustomReflection{*c.reflection_matrix};
  }

  std::optional<QuantumWalk> walk;
  try {
    walk.emplace(lattice, coin, reflection);
  } catch (const Error& e) {
    const bool refl = std::string(e.what()).find("reflection") != std::string::npos;
    throw ConfigError(line_of(c, refl ? "reflection.kind" : "coin.kind"), e.what());
  }

  if (c.p.empty()) throw ConfigError(0, "missing required key p");
  std::vector<double> probs = c.p;
  if (probs.size() == 1) probs.assign(static_cast<std::size_t>(lattice.edge_count()), c.p.front());
  try {
    c.model.emplace(*walk, EdgeProbabilities(probs));
  } catch (const Error& e) {
    throw ConfigError(line_of(c, "p"), std::string("p: ") + e.what());
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "missing key before '='");
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(line, "unknown key '" + key + "'");
    }
    if (c.key_lines.count(key)) {
      throw ConfigError(line, "duplicate key '" + key + "' (first set on line " +
                                  std::to_string(c.key_lines[key]) + ")");
    }
    if (value.empty()) throw ConfigError(line, "missing value for '" + key + "'");
    c.key_lines[key] = line;
    assign(c, key, value, line);
  }
  rebuild_model(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(0, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

int parse_site(const std::string& coords, const Lattice& lattice) {
  std::vector<int> parts;
  std::stringstream ss(coords);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("malformed site coordinates '" + coords + "'");
    }
  }
  const int want = lattice.is_2d() ? 2 : 1;
  if (static_cast<int>(parts.size()) != want) {
    throw ValidationError("site needs " + std::to_string(want) + " coordinate(s), got '" + coords + "'");
  }
  const int s = parts[0];
  const int t = want == 2 ? parts[1] : 0;
  if (s < 0 || s >= lattice.extent_m() || t < 0 || t >= lattice.extent_n()) {
    throw ValidationError("site '" + coords + "' lies outside " + lattice.describe());
  }
  return lattice.vertex_index(s, t);
}

namespace {

Vector parse_coin(const std::string& spec, const Lattice& lattice) {
  const int c = lattice.coin_dim();
  Vector v = Vector::Zero(c);
  if (spec == "uniform") {
    v.setConstant(1.0);
  } else if (spec.size() == 1 && std::string("LRDU").find(spec) != std::string::npos) {
    int dir = -1;
    if (lattice.is_2d()) {
      dir = spec == "L" ? dir2d::L : spec == "D" ? dir2d::D : spec == "U" ? dir2d::U : dir2d::R;
    } else {
      if (spec == "D" || spec == "U") throw ValidationError("coin direction " + spec + " needs a 2D lattice");
      dir = spec == "L" ? dir1d::L : dir1d::R;
    }
    v[dir] = 1.0;
  } else if (!spec.empty() && spec.front() == '[') {
    io::Json j;
    try {
      j = io::Json::parse(spec);
    } catch (const io::Json::exception&) {
      throw ValidationError("malformed coin vector '" + spec + "'");
    }
    v = io::vector_from_json(j);
    if (v.size() != c) throw ValidationError("coin vector must have " + std::to_string(c) + " entries");
  } else {
    throw ValidationError("unknown coin state '" + spec + "'");
  }
  if (v.norm() == 0.0) throw ValidationError("coin vector is zero");
  return v.normalized();
}

}  // namespace

InitialState resolve_initial(const std::string& spec, const Lattice& lattice) {
  const int d = lattice.dimension();
  const int c = lattice.coin_dim();
  InitialState out;
  if (spec == "maximally-mixed") {
    out.density = Matrix::Identity(d, d) / static_cast<double>(d);
    return out;
  }
  if (spec.rfind("file:", 0) == 0) {
    const std::string path = spec.substr(5);
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open initial state file '" + path + "'");
    io::Json j;
    try {
      j = io::Json::parse(f);
    } catch (const io::Json::exception&) {
      throw ValidationError("initial state file '" + path + "' is not valid JSON");
    }
    if (j.is_array() && !j.empty() && j[0].is_array() && !j[0].empty() && j[0][0].is_array()) {
      Matrix rho = io::matrix_from_json(j);
      if (rho.rows() != d || rho.cols() != d) throw ValidationError("density matrix has wrong dimension");
      if (!linalg::is_hermitian(rho, 1e-10)) throw ValidationError("density matrix is not Hermitian");
      if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-10) throw ValidationError("density matrix trace is not 1");
      out.density = rho;
      return out;
    }
    Vector psi = io::vector_from_json(j);
    if (psi.size() != d) throw ValidationError("initial state has " + std::to_string(psi.size()) +
                                               " amplitudes, expected " + std::to_string(d));
    if (psi.norm() == 0.0) throw ValidationError("initial state is zero");
    psi.normalize();
    out.pure = psi;
    out.density = psi * psi.adjoint();
    return out;
  }

  std::istringstream ss(spec);
  std::string token;
  std::optional<std::string> site, coin;
  bool uniform_position = false;
  while (ss >> token) {
    if (token.rfind("site:", 0) == 0) {
      site = token.substr(5);
    } else if (token.rfind("coin:", 0) == 0) {
      coin = token.substr(5);
    } else if (token == "uniform-position") {
      uniform_position = true;
    } else {
      throw ValidationError("unrecognised initial state token '" + token + "'");
    }
  }
  if (site.has_value() == uniform_position) {
    throw ValidationError("initial state needs exactly one of site:<coords> or uniform-position");
  }
  const Vector local = parse_coin(coin.value_or("uniform"), lattice);
  Vector psi = Vector::Zero(d);
  if (site) {
    const int x = parse_site(*site, lattice);
    psi.segment(x * c, c) = local;
  } else {
    for (int x = 0; x < lattice.vertex_count(); ++x) psi.segment(x * c, c) = local;
    psi.normalize();
  }
  out.pure = psi;
  out.density = psi * psi.adjoint();
  return out;
}

}  // namespace qwalk::cli
