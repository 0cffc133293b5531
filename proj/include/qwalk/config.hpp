#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qwalk/errors.hpp"
#include "qwalk/walk.hpp"

namespace qwalk::cli {

/// Configuration problem; the message carries the offending line when known.
class ConfigError : public ValidationError {
 public:
  ConfigError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct RunConfig {
  std::string lattice_kind;
  int n = 0;
  int m = 0;
  std::string boundary = "carpet";

  std::string coin_kind;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::optional<Matrix> coin_matrix;

  std::string reflection_kind = "default";
  std::optional<Matrix> reflection_matrix;

  std::vector<double> p;  // one value broadcasts to every edge

  std::optional<std::string> command;
  int steps = 100;
  int shots = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  int record_every = 1;
  std::string initial = "maximally-mixed";
  std::string engine = "exact";
  std::string output;
  std::string format = "json";
  std::optional<std::string> site;

  std::map<std::string, int> key_lines;

  /// The validated model; always engaged after parse_config returns.
  std::optional<WalkModel> model;
};

/// Line-oriented `key = value` text with `#` comments. Unknown or duplicate
/// keys, malformed values and model invariant violations raise ConfigError.
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::string& path);

/// Rebuilds the model after command-line overrides.
void rebuild_model(RunConfig& config);

const std::vector<std::string>& known_keys();

struct InitialState {
  std::optional<Vector> pure;
  Matrix density;
};

/// `site:<s[,t]> coin:<uniform|L|R|D|U|[amplitudes]>`,
/// `uniform-position coin:<...>`, `file:<path>` or `maximally-mixed`.
InitialState resolve_initial(const std::string& spec, const Lattice& lattice);

/// Vertex index from "s" or "s,t".
int parse_site(const std::string& coords, const Lattice& lattice);

}  // namespace qwalk::cli
