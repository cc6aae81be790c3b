#include "lac/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>

#include "lac/harness.hpp"
#include "lac/rng.hpp"
#include "lac/static_consensus.hpp"

namespace lac {
namespace {

namespace fs = std::filesystem;
using Schema = std::vector<std::pair<std::string, std::string>>;

constexpr double kPi = std::numbers::pi;
constexpr int kMaxFieldDepth = 8;

const Schema& chain_schema() {
  static const Schema s{{"n", "64"},     {"boundary", "ring"}, {"halo_depth", "auto"},
                        {"rounds", "40"}, {"master_seed", ""}};
  return s;
}

const Schema& field_schema() {
  static const Schema s{{"kind", "constant"}, {"value", "1"},     {"center", "0"},
                        {"height", "1"},      {"amplitude", "1"}, {"omega", "0"},
                        {"harmonic", ""},     {"phase", "0"},     {"table", ""},
                        {"terms", ""},        {"noise", "none"},  {"sigma", "0"},
                        {"bound", "1e12"}};
  return s;
}

const Schema& algorithm_schema() {
  static const Schema s{{"variant", "exponential"}, {"rho", "0.8"},     {"rho_b", "0.5"},
                        {"rho_f", "0.25"},          {"L", "5"},         {"L_profile", ""},
                        {"weights", ""},            {"K", "auto"},      {"radius", "20"},
                        {"tol_K", "auto"},          {"enforce_row_sums", "true"}};
  return s;
}

const Schema& analysis_schema() {
  static const Schema s{{"settle", "auto"},
                        {"fit_rounds", "200"},
                        {"harmonics", "1,2,4,8,16"},
                        {"omegas", "0,0.05,0.1,0.5,1"},
                        {"replicates", "10000"},
                        {"sigma", "1"},
                        {"noise_distribution", "gaussian"},
                        {"noise_scheme", "algorithm"},
                        {"global_n", "100"},
                        {"spacing_law", "exp_density"},
                        {"eta", "0.3"},
                        {"tail_eps", "1e-12"}};
  return s;
}

const Schema& output_schema() {
  static const Schema s{{"dir", "out"}};
  return s;
}

bool is_term_section(std::string_view section) {
  if (section.rfind("field.", 0) != 0 || section.size() == 6) return false;
  for (char c : section.substr(6)) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

const Schema* schema_for(std::string_view section) {
  if (section == "chain") return &chain_schema();
  if (section == "field" || is_term_section(section)) return &field_schema();
  if (section == "algorithm") return &algorithm_schema();
  if (section == "analysis") return &analysis_schema();
  if (section == "output") return &output_schema();
  return nullptr;
}

bool in_schema(const Schema& schema, std::string_view key) {
  for (const auto& [k, v] : schema) {
    if (k == key) return true;
  }
  return false;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::pair<std::string, std::string> split_key(std::string_view dotted) {
  const auto dot = dotted.rfind('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == dotted.size()) {
    fail(ErrorKind::validation, "config key must look like section.key", std::string(dotted));
  }
  return {std::string(dotted.substr(0, dot)), std::string(dotted.substr(dot + 1))};
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& text, std::string_view key) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    fail(ErrorKind::validation, "expected a number, got '" + t + "'", std::string(key));
  }
  return value;
}

long parse_long(const std::string& text, std::string_view key) {
  const std::string t = trim(text);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    fail(ErrorKind::validation, "expected an integer, got '" + t + "'", std::string(key));
  }
  return value;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Re-throws errors from parameter constructors with the config key attached.
template <class F>
auto keyed(std::string_view key, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (!e.key().empty()) throw;
    throw Error(e.kind(), e.what(), std::string(key));
  }
}

std::string read_file(const fs::path& path, std::string key = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string(), std::move(key));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string(), "output.dir");
  out << content;
  if (!out) fail(ErrorKind::io, "write failed for " + path.string(), "output.dir");
}

fs::path prepare_output(const ExperimentConfig& config) {
  const fs::path dir = config.output_dir();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message(), "output.dir");
  return dir;
}

std::string csv_preamble(const ExperimentConfig& config) {
  std::string out;
  std::istringstream lines(config.to_ini());
  std::string line;
  while (std::getline(lines, line)) out += "# " + line + "\n";
  return out;
}

nlohmann::ordered_json report_header(std::string_view command) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["command"] = command;
  return j;
}

void attach_config(nlohmann::ordered_json& j, const ExperimentConfig& config) {
  j["config"] = config.to_json();
  j["config_ini"] = config.to_ini();
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

fields::Table read_table(const fs::path& path, std::string_view key) {
  std::istringstream in(read_file(path, std::string(key)));
  std::string header;
  std::getline(in, header);
  header = trim(header);
  const bool timed = header == "round,sensor,value";
  if (!timed && header != "sensor,value") {
    fail(ErrorKind::validation, "table CSV header must be 'sensor,value' or 'round,sensor,value'",
         std::string(key));
  }
  std::map<std::pair<long, long>, double> entries;
  long max_round = 0;
  long max_sensor = -1;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_list(line);
    if (cells.size() != (timed ? 3u : 2u)) {
      fail(ErrorKind::validation, "malformed table row '" + line + "'", std::string(key));
    }
    const long round = timed ? parse_long(cells[0], key) : 0;
    const long sensor = parse_long(cells[timed ? 1 : 0], key);
    if (round < 0 || sensor < 0) fail(ErrorKind::validation, "negative table index", std::string(key));
    entries[{round, sensor}] = parse_double(cells.back(), key);
    max_round = std::max(max_round, round);
    max_sensor = std::max(max_sensor, sensor);
  }
  fields::Table table;
  table.sensors = max_sensor + 1;
  table.time_invariant = !timed;
  table.rows.assign(static_cast<std::size_t>(max_round + 1),
                    std::vector<double>(static_cast<std::size_t>(table.sensors), 0.0));
  if (entries.size() != table.rows.size() * static_cast<std::size_t>(table.sensors)) {
    fail(ErrorKind::validation, "table must list every (round, sensor) pair", std::string(key));
  }
  for (const auto& [idx, v] : entries) {
    table.rows[static_cast<std::size_t>(idx.first)][static_cast<std::size_t>(idx.second)] = v;
  }
  return table;
}

Round default_settle(const AlgorithmSpec& algorithm) {
  auto exp_settle = [](double rho) {
    return static_cast<Round>(std::ceil(std::log(1e-9) / std::log(rho))) + 1;
  };
  return std::visit(
      [&](const auto& a) -> Round {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, algorithms::Exponential> ||
                      std::is_same_v<T, algorithms::DynExponential>) {
          return exp_settle(a.rho.value());
        } else if constexpr (std::is_same_v<T, algorithms::Asymmetric>) {
          return exp_settle(std::max(a.rho_backward.value(), a.rho_forward.value()));
        } else if constexpr (std::is_same_v<T, algorithms::Arbitrary>) {
          return a.table.radius();
        } else if constexpr (std::is_same_v<T, algorithms::DynWindow>) {
          return a.L.value() + 1;
        } else {
          return max_half_width(algorithm);
        }
      },
      algorithm);
}

Round settle_rounds(const ExperimentConfig& config, const AlgorithmSpec& algorithm) {
  const std::string s = config.string_value("analysis.settle");
  if (s == "auto") return default_settle(algorithm);
  const long v = config.integer("analysis.settle");
  if (v < 0) fail(ErrorKind::validation, "settle must be >= 0", "analysis.settle");
  return static_cast<Round>(v);
}

NoiseDistribution distribution_from(const std::string& name, std::string_view key) {
  if (name == "gaussian") return NoiseDistribution::gaussian;
  if (name == "uniform") return NoiseDistribution::uniform;
  fail(ErrorKind::validation, "noise distribution must be gaussian or uniform", std::string(key));
}

std::uint64_t require_seed(const ExperimentConfig& config) {
  if (!config.has_seed()) {
    fail(ErrorKind::validation, "master_seed is mandatory for stochastic runs", "chain.master_seed");
  }
  return config.seed();
}

/// Analytic spatial response (complex) of a scheme at omega.
std::complex<double> spatial_response(const AlgorithmSpec& algorithm, double omega) {
  if (const auto* a = std::get_if<algorithms::Exponential>(&algorithm)) return h_exp(a->rho, omega);
  if (const auto* a = std::get_if<algorithms::DynExponential>(&algorithm)) return h_exp(a->rho, omega);
  if (const auto* a = std::get_if<algorithms::Window>(&algorithm)) return h_window(a->L, omega);
  if (const auto* a = std::get_if<algorithms::DynWindow>(&algorithm)) return h_window(a->L, omega);
  if (const auto* a = std::get_if<algorithms::Asymmetric>(&algorithm)) {
    const double b = a->rho_backward.value();
    const double f = a->rho_forward.value();
    const auto back = b * std::polar(1.0, -omega);
    const auto fwd = f * std::polar(1.0, omega);
    const double scale = (1.0 - b) * (1.0 - f) / (1.0 - b * f);
    return scale * (1.0 + back / (1.0 - back) + fwd / (1.0 - fwd));
  }
  fail(ErrorKind::validation,
       "spatial response is defined for exponential, asymmetric, window, dyn_exponential and "
       "dyn_window",
       "algorithm.variant");
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  for (const char* section : {"chain", "field", "algorithm", "analysis", "output"}) {
    for (const auto& [k, v] : *schema_for(section)) values_[section][k] = v;
  }
}

ExperimentConfig ExperimentConfig::parse_ini(std::string_view text) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    fail(ErrorKind::validation, std::string("config parse error: ") + e.what());
  }
  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    if (!schema_for(section)) fail(ErrorKind::validation, "unknown config section [" + section + "]", section);
    if (!body.data().empty()) {
      fail(ErrorKind::validation, "config key '" + section + "' is outside any section", section);
    }
    if (is_term_section(section) && !config.values_.count(section)) {
      for (const auto& [k, v] : field_schema()) config.values_[section][k] = v;
    }
    for (const auto& [key, value] : body) config.set(section + "." + key, value.data());
  }
  return config;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const std::string ext = path.extension().string();
  if (ext == ".json") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::validation, path.string() + ": " + e.what());
    }
    if (!j.contains("config_ini") || !j["config_ini"].is_string()) {
      fail(ErrorKind::validation, path.string() + " carries no config_ini");
    }
    return parse_ini(j["config_ini"].get<std::string>());
  }
  if (ext == ".csv") {
    std::istringstream lines(text);
    std::string line;
    std::string ini;
    while (std::getline(lines, line) && line.rfind("# ", 0) == 0) ini += line.substr(2) + "\n";
    if (ini.empty()) fail(ErrorKind::validation, path.string() + " has no embedded config");
    return parse_ini(ini);
  }
  return parse_ini(text);
}

void ExperimentConfig::set(std::string_view dotted_key, std::string_view value) {
  auto [section, key] = split_key(dotted_key);
  const Schema* schema = schema_for(section);
  if (!schema) fail(ErrorKind::validation, "unknown config section [" + section + "]", std::string(dotted_key));
  if (!in_schema(*schema, key)) {
    fail(ErrorKind::validation, "unknown config key " + std::string(dotted_key), std::string(dotted_key));
  }
  if (!values_.count(section)) {
    for (const auto& [k, v] : *schema) values_[section][k] = v;
  }
  values_[section][key] = trim(value);
}

std::optional<std::string> ExperimentConfig::get(std::string_view dotted_key) const {
  const auto [section, key] = split_key(dotted_key);
  const auto s = values_.find(section);
  if (s == values_.end()) return std::nullopt;
  const auto v = s->second.find(key);
  if (v == s->second.end()) return std::nullopt;
  return v->second;
}

std::string ExperimentConfig::to_ini() const {
  std::vector<std::string> order{"chain", "field"};
  for (const auto& [section, body] : values_) {
    if (is_term_section(section)) order.push_back(section);
  }
  for (const char* s : {"algorithm", "analysis", "output"}) order.emplace_back(s);
  std::string out;
  for (const auto& section : order) {
    out += "[" + section + "]\n";
    const auto& body = values_.at(section);
    for (const auto& [k, v] : *schema_for(section)) out += k + "=" + body.at(k) + "\n";
  }
  return out;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [section, body] : values_) {
    for (const auto& [k, v] : body) j[section][k] = v;
  }
  return j;
}

std::string ExperimentConfig::string_value(std::string_view dotted_key) const {
  auto v = get(dotted_key);
  if (!v) fail(ErrorKind::validation, "missing config key " + std::string(dotted_key), std::string(dotted_key));
  return *v;
}

double ExperimentConfig::number(std::string_view dotted_key) const {
  return parse_double(string_value(dotted_key), dotted_key);
}

long ExperimentConfig::integer(std::string_view dotted_key) const {
  return parse_long(string_value(dotted_key), dotted_key);
}

bool ExperimentConfig::flag(std::string_view dotted_key) const {
  const std::string v = string_value(dotted_key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(ErrorKind::validation, "expected true or false, got '" + v + "'", std::string(dotted_key));
}

std::vector<double> ExperimentConfig::number_list(std::string_view dotted_key) const {
  std::vector<double> out;
  for (const auto& item : split_list(string_value(dotted_key))) out.push_back(parse_double(item, dotted_key));
  return out;
}

bool ExperimentConfig::has_seed() const { return !string_value("chain.master_seed").empty(); }

std::uint64_t ExperimentConfig::seed() const {
  const std::string t = string_value("chain.master_seed");
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    fail(ErrorKind::validation, "master_seed must be a non-negative integer", "chain.master_seed");
  }
  return value;
}

std::filesystem::path ExperimentConfig::output_dir() const { return string_value("output.dir"); }

ChainConfig ExperimentConfig::chain() const {
  ChainConfig chain;
  chain.n = integer("chain.n");
  if (chain.n < 3) fail(ErrorKind::validation, "chain needs at least 3 sensors", "chain.n");
  chain.rounds = static_cast<Round>(integer("chain.rounds"));
  if (chain.rounds < 0) fail(ErrorKind::validation, "rounds must be >= 0", "chain.rounds");
  const std::string boundary = string_value("chain.boundary");
  if (boundary == "ring") {
    chain.boundary = boundaries::Ring{};
  } else if (boundary == "zero_halo") {
    boundaries::ZeroHalo halo;
    const std::string depth = string_value("chain.halo_depth");
    if (depth != "auto") halo.depth = integer("chain.halo_depth");
    chain.boundary = halo;
  } else if (boundary == "truncated") {
    chain.boundary = boundaries::Truncated{};
  } else {
    fail(ErrorKind::validation, "boundary must be ring, zero_halo or truncated", "chain.boundary");
  }
  if (has_seed()) chain.master_seed = seed();
  return chain;
}

MeasurementField ExperimentConfig::field() const { return field_section("field", chain(), 0); }

MeasurementField ExperimentConfig::field_section(const std::string& section,
                                                 const ChainConfig& chain, int depth) const {
  if (depth > kMaxFieldDepth) fail(ErrorKind::validation, "sum fields nest too deeply", section + ".terms");
  auto key = [&](const char* k) { return section + "." + k; };
  const std::string kind = string_value(key("kind"));
  auto omega = [&] {
    const std::string harmonic = string_value(key("harmonic"));
    if (!harmonic.empty()) return 2.0 * kPi * number(key("harmonic")) / static_cast<double>(chain.n);
    return number(key("omega"));
  };
  FieldKind fk;
  if (kind == "constant") {
    fk = fields::Constant{number(key("value"))};
  } else if (kind == "impulse") {
    fk = fields::Impulse{integer(key("center")), number(key("height"))};
  } else if (kind == "spatial_cosine") {
    fk = fields::SpatialCosine{number(key("amplitude")), omega(), number(key("phase"))};
  } else if (kind == "temporal_cosine") {
    fk = fields::TemporalCosine{number(key("amplitude")), omega(), number(key("phase"))};
  } else if (kind == "table") {
    const std::string path = string_value(key("table"));
    if (path.empty()) fail(ErrorKind::validation, "table field needs a CSV path", key("table"));
    fk = read_table(path, key("table"));
  } else if (kind == "sum") {
    fields::Sum sum;
    for (const auto& name : split_list(string_value(key("terms")))) {
      const std::string term = "field." + name;
      if (!values_.count(term)) {
        fail(ErrorKind::validation, "sum term [" + term + "] is not defined", key("terms"));
      }
      sum.terms.push_back(field_section(term, chain, depth + 1));
    }
    if (sum.terms.empty()) fail(ErrorKind::validation, "sum field needs terms", key("terms"));
    fk = std::move(sum);
  } else {
    fail(ErrorKind::validation,
         "field kind must be constant, impulse, spatial_cosine, temporal_cosine, table or sum",
         key("kind"));
  }
  std::optional<NoiseSpec> noise;
  const std::string noise_kind = string_value(key("noise"));
  if (noise_kind != "none") {
    NoiseSpec spec;
    spec.distribution = distribution_from(noise_kind, key("noise"));
    spec.sigma = number(key("sigma"));
    if (!(spec.sigma >= 0.0)) fail(ErrorKind::validation, "sigma must be >= 0", key("sigma"));
    spec.seed = rng::derive(require_seed(*this), fnv1a(section));
    noise = spec;
  }
  MeasurementField field(std::move(fk), noise, number(key("bound")));
  keyed(section, [&] {
    field.validate();
    return 0;
  });
  return field;
}

AlgorithmSpec ExperimentConfig::algorithm() const {
  const std::string variant = string_value("algorithm.variant");
  auto rate = [&](const char* k) {
    const std::string full = std::string("algorithm.") + k;
    return keyed(full, [&] { return Rate(number(full)); });
  };
  auto half_width = [&] {
    return keyed("algorithm.L", [&] { return HalfWidth(static_cast<int>(integer("algorithm.L"))); });
  };
  if (variant == "exponential") return algorithms::Exponential{rate("rho")};
  if (variant == "asymmetric") return algorithms::Asymmetric{rate("rho_b"), rate("rho_f")};
  if (variant == "window") return algorithms::Window{half_width()};
  if (variant == "dyn_exponential") return algorithms::DynExponential{rate("rho")};
  if (variant == "dyn_window") return algorithms::DynWindow{half_width()};
  if (variant == "variable_window") {
    std::vector<int> profile;
    for (double v : number_list("algorithm.L_profile")) {
      if (v != std::floor(v)) fail(ErrorKind::validation, "L_profile entries must be integers", "algorithm.L_profile");
      profile.push_back(static_cast<int>(v));
    }
    if (profile.empty()) fail(ErrorKind::validation, "variable_window needs L_profile", "algorithm.L_profile");
    keyed("algorithm.L_profile", [&] {
      validate_window_profile(profile, chain().is_ring());
      return 0;
    });
    return algorithms::VariableWindow{std::move(profile)};
  }
  if (variant == "arbitrary") {
    algorithms::Arbitrary a;
    const std::string path = string_value("algorithm.weights");
    const std::string K = string_value("algorithm.K");
    const std::string tol = string_value("algorithm.tol_K");
    if (path.empty()) {
      const Rate rho = rate("rho");
      const long radius = integer("algorithm.radius");
      if (radius < 1) fail(ErrorKind::validation, "radius must be >= 1", "algorithm.radius");
      a.table = WeightTable::geometric(chain().n, rho, static_cast<int>(radius));
      a.tol_K = tol == "auto" ? 2.0 * std::pow(rho.value(), radius) / (1.0 - rho.value())
                              : number("algorithm.tol_K");
    } else {
      std::istringstream in(read_file(path, "algorithm.weights"));
      a.table = keyed("algorithm.weights", [&] { return WeightTable::read_csv(in, 1.0); });
      a.table.set_K(a.table.row_sum(0));
      a.tol_K = tol == "auto" ? 1e-9 : number("algorithm.tol_K");
    }
    if (K != "auto") a.table.set_K(number("algorithm.K"));
    if (!(a.table.K() != 0.0) || !std::isfinite(a.table.K())) {
      fail(ErrorKind::validation, "K must be finite and nonzero", "algorithm.K");
    }
    a.enforce_row_sums = flag("algorithm.enforce_row_sums");
    return a;
  }
  fail(ErrorKind::validation,
       "variant must be exponential, asymmetric, window, variable_window, arbitrary, "
       "dyn_exponential or dyn_window",
       "algorithm.variant");
}

std::vector<double> figure_grid_origin() {
  std::vector<double> grid;
  for (int m = 0; m <= 500; ++m) grid.push_back(m * 5e-4);
  return grid;
}

std::vector<double> figure_grid_full() {
  std::vector<double> grid;
  for (int m = 0; m <= 1000; ++m) grid.push_back(kPi * m / 1000.0);
  return grid;
}

std::vector<double> figure_rhos() { return {0.8, 0.9, 0.95, 0.99}; }

std::vector<int> figure_window_lengths() { return {2, 5, 10, 20}; }

namespace commands {

std::vector<fs::path> simulate(const ExperimentConfig& config) {
  const ChainConfig chain = config.chain();
  const MeasurementField field = config.field();
  const AlgorithmSpec algorithm = config.algorithm();
  const ConsensusTrace trace = run(chain, field, algorithm);
  const fs::path dir = prepare_output(config);

  std::ostringstream csv;
  csv << csv_preamble(config);
  write_trace_csv(trace, csv);
  const fs::path csv_path = dir / "trace.csv";
  write_file(csv_path, csv.str());

  auto meta = report_header("simulate");
  meta["algorithm"] = algorithm_name(algorithm);
  meta["boundary"] = boundary_name(chain.boundary);
  meta["sensors"] = trace.sensors;
  meta["rounds"] = trace.rounds;
  meta["messages"] = trace.audit.size();
  meta["locality_violations"] = audit_locality(trace);
  meta["own_history_depth"] = trace.own_history_depth;
  meta["neighbor_history_depth"] = trace.neighbor_history_depth;
  meta["payload_values"] = trace.z_width > 0 ? trace.z_width : 1;
  if (const auto* vw = std::get_if<algorithms::VariableWindow>(&algorithm)) {
    auto sums = nlohmann::ordered_json::array();
    for (Sensor i = 0; i < chain.n; ++i) sums.push_back(variable_window_weight_sum(vw->L, i, chain.is_ring()));
    meta["weight_sums"] = sums;
  }
  if (const auto* arb = std::get_if<algorithms::Arbitrary>(&algorithm)) {
    meta["enforce_row_sums"] = arb->enforce_row_sums;
    meta["weight_report"] = nlohmann::ordered_json::parse(validate_weights(arb->table, arb->tol_K).to_json());
  }
  meta["generated_at"] = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::time(nullptr)));
  attach_config(meta, config);
  const fs::path meta_path = dir / "trace_meta.json";
  write_file(meta_path, meta.dump(2) + "\n");
  return {csv_path, meta_path};
}

std::vector<fs::path> freq_spatial(const ExperimentConfig& config) {
  ChainConfig chain = config.chain();
  if (!chain.is_ring()) fail(ErrorKind::validation, "freq-spatial needs a ring", "chain.boundary");
  const AlgorithmSpec algorithm = config.algorithm();
  spatial_response(algorithm, 0.0);
  const Round settle = settle_rounds(config, algorithm);
  chain.rounds = settle;
  const double amplitude = config.number("field.amplitude");
  const double phase = config.number("field.phase");

  std::string out = csv_preamble(config) + "omega,analytic_gain,measured_gain,analytic_phase,measured_phase\n";
  for (double m : config.number_list("analysis.harmonics")) {
    const double omega = 2.0 * kPi * m / static_cast<double>(chain.n);
    const MeasurementField field(fields::SpatialCosine{amplitude, omega, phase});
    const auto trace = run(chain, field, algorithm, RunOptions{false});
    const auto measured = measure_gain(trace, algorithm, field, omega, GainMode::spatial, settle);
    const auto analytic = spatial_response(algorithm, omega);
    out += fmt::format("{},{},{},{},{}\n", num(omega), num(std::abs(analytic)), num(measured.gain),
                       num(std::arg(analytic)), num(measured.phase));
  }
  const fs::path path = prepare_output(config) / "freq_spatial.csv";
  write_file(path, out);
  return {path};
}

std::vector<fs::path> freq_temporal(const ExperimentConfig& config) {
  ChainConfig chain = config.chain();
  const AlgorithmSpec algorithm = config.algorithm();
  if (!is_dynamic(algorithm)) {
    fail(ErrorKind::validation, "freq-temporal needs dyn_exponential or dyn_window", "algorithm.variant");
  }
  const Round settle = settle_rounds(config, algorithm);
  const long fit = config.integer("analysis.fit_rounds");
  if (fit < 2) fail(ErrorKind::validation, "fit_rounds must be >= 2", "analysis.fit_rounds");
  chain.rounds = settle + static_cast<Round>(fit);
  const double amplitude = config.number("field.amplitude");
  const double phase = config.number("field.phase");

  std::string out = csv_preamble(config) + "omega,analytic_gain,measured_gain,analytic_phase,measured_phase\n";
  for (double omega : config.number_list("analysis.omegas")) {
    const MeasurementField field(fields::TemporalCosine{amplitude, omega, phase});
    const auto trace = run(chain, field, algorithm, RunOptions{false});
    const auto measured = measure_gain(trace, algorithm, field, omega, GainMode::temporal, settle);
    const TransferSample analytic =
        std::holds_alternative<algorithms::DynExponential>(algorithm)
            ? k_temporal_exp(std::get<algorithms::DynExponential>(algorithm).rho, omega)
            : k_temporal_window(std::get<algorithms::DynWindow>(algorithm).L, omega);
    out += fmt::format("{},{},{},{},{}\n", num(omega), num(analytic.gain), num(measured.gain),
                       num(analytic.phase), num(measured.phase));
  }
  const fs::path path = prepare_output(config) / "freq_temporal.csv";
  write_file(path, out);
  return {path};
}

std::vector<fs::path> noise(const ExperimentConfig& config) {
  const std::uint64_t seed = require_seed(config);
  const double sigma = config.number("analysis.sigma");
  const long replicates = config.integer("analysis.replicates");
  if (replicates < 2) fail(ErrorKind::validation, "need at least 2 replicates", "analysis.replicates");
  const auto distribution =
      distribution_from(config.string_value("analysis.noise_distribution"), "analysis.noise_distribution");
  const std::string scheme = config.string_value("analysis.noise_scheme");

  auto j = report_header("noise");
  j["scheme"] = scheme;
  j["sigma"] = sigma;
  j["distribution"] = config.string_value("analysis.noise_distribution");
  NoiseReport report;
  if (scheme == "global") {
    const long N = config.integer("analysis.global_n");
    report = monte_carlo_noise_global(N, sigma, static_cast<int>(replicates), seed, distribution);
    j["N"] = N;
  } else if (scheme == "algorithm") {
    ChainConfig chain = config.chain();
    const AlgorithmSpec algorithm = config.algorithm();
    chain.rounds = std::max(chain.rounds, settle_rounds(config, algorithm));
    report = monte_carlo_noise(chain, algorithm, sigma, static_cast<int>(replicates), seed, distribution);
    j["algorithm"] = algorithm_name(algorithm);
    j["rounds"] = chain.rounds;
  } else {
    fail(ErrorKind::validation, "noise_scheme must be algorithm or global", "analysis.noise_scheme");
  }
  j["analytic_variance"] = report.analytic_variance;
  j["sampled_variance"] = report.sampled_variance;
  j["replicates"] = report.replicates;
  j["standard_error"] = report.standard_error;
  attach_config(j, config);
  const fs::path path = prepare_output(config) / "noise.json";
  write_file(path, j.dump(2) + "\n");
  return {path};
}

std::vector<fs::path> spacing(const ExperimentConfig& config) {
  const std::uint64_t seed = require_seed(config);
  const Rate rho = keyed("algorithm.rho", [&] { return Rate(config.number("algorithm.rho")); });
  const std::string law_name = config.string_value("analysis.spacing_law");
  SpacingLaw law;
  if (law_name == "exp_density") {
    law = spacing::ExpDensity{};
  } else if (law_name == "uniform") {
    law = spacing::Uniform{config.number("analysis.eta")};
    keyed("analysis.eta", [&] {
      validate(law);
      return 0;
    });
  } else {
    fail(ErrorKind::validation, "spacing_law must be exp_density or uniform", "analysis.spacing_law");
  }
  const long replicates = config.integer("analysis.replicates");
  if (replicates < 2) fail(ErrorKind::validation, "need at least 2 replicates", "analysis.replicates");
  const SpacingReport report = monte_carlo_spacing(rho, law, static_cast<int>(replicates), seed,
                                                   config.number("analysis.tail_eps"));
  auto j = report_header("spacing");
  const auto fields = nlohmann::ordered_json::parse(report.to_json());
  for (const auto& [k, v] : fields.items()) {
    if (k != "schema_version") j[k] = v;
  }
  attach_config(j, config);
  const fs::path path = prepare_output(config) / "spacing.json";
  write_file(path, j.dump(2) + "\n");
  return {path};
}

std::vector<fs::path> figures(const ExperimentConfig& config) {
  const fs::path dir = prepare_output(config);
  const std::string preamble = csv_preamble(config);
  std::vector<fs::path> written;
  auto emit = [&](const char* name, const std::vector<double>& grid, const auto& params,
                  const auto& gain) {
    std::string out = preamble + "omega,gain,param\n";
    for (double w : grid) {
      for (const auto p : params) out += fmt::format("{},{},{}\n", num(w), num(gain(p, w)), p);
    }
    written.push_back(dir / name);
    write_file(written.back(), out);
  };
  const auto h = [](double rho, double w) { return h_exp(Rate(rho), w); };
  const auto k = [](double rho, double w) { return k_temporal_exp(Rate(rho), w).gain; };
  const auto kw = [](int L, double w) { return k_temporal_window(HalfWidth(L), w).gain; };
  emit("fig_h_exp_origin.csv", figure_grid_origin(), figure_rhos(), h);
  emit("fig_h_exp.csv", figure_grid_full(), figure_rhos(), h);
  emit("fig_k_exp_origin.csv", figure_grid_origin(), figure_rhos(), k);
  emit("fig_k_exp.csv", figure_grid_full(), figure_rhos(), k);
  emit("fig_k_window.csv", figure_grid_full(), figure_window_lengths(), kw);
  return written;
}

std::vector<fs::path> run(std::string_view name, const ExperimentConfig& config) {
  if (name == "simulate") return simulate(config);
  if (name == "freq-spatial") return freq_spatial(config);
  if (name == "freq-temporal") return freq_temporal(config);
  if (name == "noise") return noise(config);
  if (name == "spacing") return spacing(config);
  if (name == "figures") return figures(config);
  fail(ErrorKind::validation, "unknown command '" + std::string(name) + "'");
}

}  // namespace commands
}  // namespace lac
