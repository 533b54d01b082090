#include "subspect/config.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace subspect::harness {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

const char* kDefaultConfig = R"(
[frame]
n = 14
q = 299
p_max = 4
snr_db = 10
channel = awgn
doppler = 1e-4
rician_k = 4
num_paths = 48
rolloff = 0.35
sps = 2
span = 40

[sampler]
k = 7
offsets = auto

[dataset]
kind = dwss
count = 1024
seed = 1
snr_grid = -10:20:2
l_symbols = 256

[model]
arch = dlwss
init_seed = 7

[learning]
lr = 1e-3
batch = 64
max_epochs = 30
beta1 = 0.9
beta2 = 0.999
eps = 1e-8
patience = 5
val_fraction = 0.1
seed = 1
sgd = false

[experiment]
frames_per_snr = 128
seed = 99
sparsity_mode = oracle
fixed_k = 2
)";

}  // namespace

Config Config::from_text(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    lineno++;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.values_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

Config Config::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  Config cfg = from_text(ss.str());
  // Fill unset keys from the defaults so partial files work.
  Config def = defaults();
  for (const auto& [k, v] : def.values_)
    cfg.values_.emplace(k, v);
  return cfg;
}

Config Config::defaults() { return from_text(kDefaultConfig); }

void Config::apply_override(const std::string& key_eq_value) {
  const auto eq = key_eq_value.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--set expects key=value, got: " + key_eq_value);
  const std::string key = trim(key_eq_value.substr(0, eq));
  const std::string value = trim(key_eq_value.substr(eq + 1));
  if (key.empty()) throw ConfigError("--set: empty key");
  overrides_[key] = value;
}

std::string Config::lookup(const std::string& key) const {
  if (auto it = overrides_.find(key); it != overrides_.end()) return it->second;
  const auto dot = key.rfind('.');
  if (dot != std::string::npos) {
    if (auto it = overrides_.find(key.substr(dot + 1)); it != overrides_.end())
      return it->second;
  }
  if (auto it = values_.find(key); it != values_.end()) return it->second;
  return "";
}

bool Config::has(const std::string& key) const { return !lookup(key).empty(); }

std::string Config::get_str(const std::string& key,
                            const std::string& fallback) const {
  const std::string v = lookup(key);
  return v.empty() ? fallback : v;
}

double Config::get_double(const std::string& key, double fallback) const {
  const std::string v = lookup(key);
  if (v.empty()) return fallback;
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " is not a number: " + v);
  }
}

int Config::get_int(const std::string& key, int fallback) const {
  const std::string v = lookup(key);
  if (v.empty()) return fallback;
  try {
    size_t pos = 0;
    const long val = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<int>(val);
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " is not an integer: " + v);
  }
}

uint64_t Config::get_u64(const std::string& key, uint64_t fallback) const {
  const std::string v = lookup(key);
  if (v.empty()) return fallback;
  try {
    size_t pos = 0;
    const unsigned long long val = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return val;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " is not an unsigned integer: " + v);
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const std::string v = lookup(key);
  if (v.empty()) return fallback;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: " + key + " is not a boolean: " + v);
}

std::string Config::render() const {
  std::map<std::string, std::string> merged = values_;
  for (const auto& [k, v] : overrides_) {
    if (k.find('.') != std::string::npos) {
      merged[k] = v;
      continue;
    }
    bool matched = false;
    for (auto& [mk, mv] : merged) {
      const auto dot = mk.rfind('.');
      if (dot != std::string::npos && mk.substr(dot + 1) == k) {
        mv = v;
        matched = true;
      }
    }
    if (!matched) merged[k] = v;
  }
  std::ostringstream os;
  for (const auto& [k, v] : merged) os << k << " = " << v << "\n";
  return os.str();
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  const auto colon = text.find(':');
  try {
    if (colon != std::string::npos) {
      const auto colon2 = text.find(':', colon + 1);
      if (colon2 == std::string::npos)
        throw ConfigError("grid wants lo:hi:step");
      const double lo = std::stod(text.substr(0, colon));
      const double hi = std::stod(text.substr(colon + 1, colon2 - colon - 1));
      const double step = std::stod(text.substr(colon2 + 1));
      if (step <= 0) throw ConfigError("grid step must be > 0");
      for (double v = lo; v <= hi + 1e-9; v += step) grid.push_back(v);
    } else {
      std::istringstream is(text);
      std::string tok;
      while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) grid.push_back(std::stod(tok));
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("bad grid: " + text);
  }
  if (grid.empty()) throw ConfigError("empty grid: " + text);
  return grid;
}

std::vector<double> Config::snr_grid() const {
  return parse_grid(get_str("dataset.snr_grid", "-10:20:2"));
}

sig::FrameCfg Config::frame_cfg() const {
  sig::FrameCfg f;
  f.n_bands = get_int("frame.n", 14);
  f.q = get_int("frame.q", 299);
  f.p_max = get_int("frame.p_max", 4);
  f.snr_db = get_double("frame.snr_db", 10);
  const std::string ch = get_str("frame.channel", "awgn");
  if (ch == "awgn")
    f.channel.kind = sig::ChannelKind::awgn;
  else if (ch == "rayleigh")
    f.channel.kind = sig::ChannelKind::rayleigh;
  else if (ch == "rician")
    f.channel.kind = sig::ChannelKind::rician;
  else
    throw ConfigError("config: unknown channel kind: " + ch);
  f.channel.normalized_doppler = get_double("frame.doppler", 1e-4);
  f.channel.rician_k = get_double("frame.rician_k", 4);
  f.channel.num_paths = get_int("frame.num_paths", 48);
  f.rolloff = get_double("frame.rolloff", 0.35);
  f.sps = get_int("frame.sps", 2);
  f.span_symbols = get_int("frame.span", 40);
  f.validate();
  return f;
}

nn::TrainCfg Config::train_cfg() const {
  nn::TrainCfg t;
  t.lr = get_double("learning.lr", 1e-3);
  t.batch = get_int("learning.batch", 64);
  t.max_epochs = get_int("learning.max_epochs", 30);
  t.beta1 = get_double("learning.beta1", 0.9);
  t.beta2 = get_double("learning.beta2", 0.999);
  t.eps = get_double("learning.eps", 1e-8);
  t.patience = get_int("learning.patience", 5);
  t.val_fraction = get_double("learning.val_fraction", 0.1);
  t.seed = get_u64("learning.seed", 1);
  t.plain_sgd = get_bool("learning.sgd", false);
  t.validate();
  return t;
}

data::GenCfg Config::gen_cfg() const {
  data::GenCfg g;
  g.frame = frame_cfg();
  g.snr_grid = snr_grid();
  g.l_symbols = get_int("dataset.l_symbols", 256);
  g.config_text = render();
  return g;
}

}  // namespace subspect::harness
