#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "georoute/analytics.hpp"
#include "georoute/experiments.hpp"
#include "georoute/pointprocess.hpp"
#include "georoute/routing.hpp"

namespace georoute::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every key accepted both as --flag and in a config file.
const std::vector<std::string> kKeys = {"lambda", "area",   "radius", "c",    "eta",  "scheme",
                                        "h",      "near-edge", "fields", "routes", "seed", "jobs",
                                        "src",    "dst",    "trace",  "confidence"};

using KeyMap = std::map<std::string, std::string>;

std::string num(double v) { return fmt::format("{:.9g}", v); }
std::string exact(double v) { return fmt::format("{}", v); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(key + ": expected a number, got '" + text + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] == '-') throw std::invalid_argument(text);
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(key + ": expected a non-negative integer, got '" + text + "'");
  }
}

Point2 to_point(const std::string& key, const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError(key + ": expected x,y");
  return {to_double(key, trim(text.substr(0, comma))), to_double(key, trim(text.substr(comma + 1)))};
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw UsageError(key + ": expected true or false, got '" + text + "'");
}

KeyMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  KeyMap m;
  const std::string head = trim(text);
  if (!head.empty() && head.front() == '{') {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const std::exception& e) {
      throw UsageError(std::string("config: invalid JSON: ") + e.what());
    }
    const json& obj = doc.contains("config") ? doc["config"] : doc;
    if (!obj.is_object()) throw UsageError("config: expected a JSON object");
    for (const auto& [k, v] : obj.items()) m[k] = v.is_string() ? v.get<std::string>() : v.dump();
  } else {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      const std::string t = trim(line.substr(0, line.find('#')));
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw UsageError("config: expected 'key = value', got '" + t + "'");
      m[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
  }
  for (const auto& [k, v] : m)
    if (std::find(kKeys.begin(), kKeys.end(), k) == kKeys.end()) throw UsageError("config: unknown key '" + k + "'");
  return m;
}

struct Settings {
  std::string lambda_spec;
  std::vector<double> lambdas;
  double area = 1.0;
  std::optional<double> radius;
  double c = 2.0 * kPi;
  double eta = 0.5;
  std::optional<SchemeKind> scheme;
  double h = 0.0;
  std::optional<double> near_edge;
  std::size_t fields = 30;
  std::size_t routes = 30;
  std::uint64_t seed = 1;
  std::size_t jobs = 0;
  std::optional<Point2> src;
  std::optional<Point2> dst;
  bool trace = false;
  double confidence = 0.95;

  double region_radius() const { return std::sqrt(area / kPi); }

  double radius_for(double lambda, std::ostream& err) const {
    if (radius) return *radius;
    if (!(lambda * area > 1.0)) throw UsageError("lambda: critical radius needs lambda * area > 1");
    const CriticalRadius r = critical_radius(lambda, area, c, eta);
    if (!r.supercritical) err << fmt::format("warning: c = {} <= 1/eta; the relay-existence condition fails\n", c);
    return r.radius;
  }

  NetworkConfig network(double lambda, std::ostream& err) const {
    NetworkConfig cfg;
    cfg.lambda = lambda;
    cfg.area = area;
    cfg.eta = eta;
    cfg.radius = radius_for(lambda, err);
    cfg.seed = seed;
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }

  double single_lambda() const {
    if (lambdas.size() != 1) throw UsageError("lambda: this command takes a single density");
    return lambdas.front();
  }

  json canonical() const {
    json c_json;
    c_json["lambda"] = lambda_spec;
    c_json["area"] = exact(area);
    if (radius)
      c_json["radius"] = exact(*radius);
    else
      c_json["c"] = exact(c);
    c_json["eta"] = exact(eta);
    if (scheme) c_json["scheme"] = std::string(scheme_name(*scheme));
    c_json["h"] = exact(h);
    if (near_edge) c_json["near-edge"] = exact(*near_edge);
    c_json["fields"] = std::to_string(fields);
    c_json["routes"] = std::to_string(routes);
    c_json["seed"] = std::to_string(seed);
    if (src) c_json["src"] = exact(src->x) + "," + exact(src->y);
    if (dst) c_json["dst"] = exact(dst->x) + "," + exact(dst->y);
    if (trace) c_json["trace"] = "true";
    c_json["confidence"] = exact(confidence);
    return c_json;
  }
};

Settings resolve(const KeyMap& m, std::size_t default_fields, std::size_t default_routes) {
  Settings s;
  s.fields = default_fields;
  s.routes = default_routes;
  auto has = [&](const char* k) { return m.count(k) > 0; };
  if (!has("lambda")) throw UsageError("lambda: required");
  s.lambda_spec = m.at("lambda");
  try {
    s.lambdas = expand_sweep(s.lambda_spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (has("area")) s.area = to_double("area", m.at("area"));
  if (!(s.area > 0.0)) throw UsageError("area: must be positive");
  if (has("radius") && has("c")) throw UsageError("radius: mutually exclusive with c");
  if (has("radius")) s.radius = to_double("radius", m.at("radius"));
  if (has("c")) s.c = to_double("c", m.at("c"));
  if (!(s.c > 0.0)) throw UsageError("c: must be positive");
  if (has("eta")) s.eta = to_double("eta", m.at("eta"));
  if (!(s.eta > 0.0 && s.eta <= 1.0)) throw UsageError("eta: must lie in (0, 1]");
  if (has("scheme")) {
    s.scheme = parse_scheme(m.at("scheme"));
    if (!s.scheme) throw UsageError("scheme: expected one of rdisk, mfr, nfp, dir, srd");
  }
  s.h = has("h") ? to_double("h", m.at("h")) : std::sqrt(s.area / 2.0);
  if (!(s.h > 0.0)) throw UsageError("h: must be positive");
  if (has("near-edge")) {
    s.near_edge = to_double("near-edge", m.at("near-edge"));
    if (!(*s.near_edge > 0.0 && *s.near_edge < 1.0)) throw UsageError("near-edge: fraction must lie in (0, 1)");
  }
  if (has("fields")) s.fields = to_uint("fields", m.at("fields"));
  if (has("routes")) s.routes = to_uint("routes", m.at("routes"));
  if (s.fields == 0) throw UsageError("fields: must be >= 1");
  if (s.routes == 0) throw UsageError("routes: must be >= 1");
  if (has("seed")) s.seed = to_uint("seed", m.at("seed"));
  if (has("jobs")) s.jobs = to_uint("jobs", m.at("jobs"));
  if (has("src")) s.src = to_point("src", m.at("src"));
  if (has("dst")) s.dst = to_point("dst", m.at("dst"));
  if (has("trace")) s.trace = to_bool("trace", m.at("trace"));
  if (has("confidence")) s.confidence = to_double("confidence", m.at("confidence"));
  if (!(s.confidence > 0.0 && s.confidence < 1.0)) throw UsageError("confidence: must lie in (0, 1)");
  return s;
}

// Collects artifacts under the output directory and writes the manifest.
class Outputs {
 public:
  Outputs(fs::path dir, std::string command, json config)
      : dir_(std::move(dir)), command_(std::move(command)), config_(std::move(config)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw std::runtime_error("out: cannot create '" + dir_.string() + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    files_.push_back({{"path", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
  }

  void finish() {
    json sidecar;
    sidecar["command"] = command_;
    sidecar["config"] = config_;
    write("config.json", sidecar.dump(2) + "\n");
    json manifest;
    manifest["command"] = command_;
    manifest["config"] = config_;
    manifest["files"] = files_;
    const std::string text = manifest.dump(2) + "\n";
    std::ofstream f(dir_ / "manifest.json", std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("cannot write manifest.json");
  }

 private:
  fs::path dir_;
  std::string command_;
  json config_;
  json files_ = json::array();
};

ExperimentConfig experiment_config(const Settings& s, double lambda, std::ostream& err, bool near_edge_default) {
  ExperimentConfig cfg;
  cfg.base = s.network(lambda, err);
  cfg.scheme = s.scheme ? SchemeSpec{*s.scheme, s.eta}.normalized() : SchemeSpec::random_disk(s.eta);
  cfg.h = s.h;
  if (s.near_edge || near_edge_default) {
    cfg.placement = Placement::NearEdge;
    cfg.edge_fraction = s.near_edge.value_or(0.95);
  }
  cfg.n_fields = s.fields;
  cfg.n_routes_per_field = s.routes;
  cfg.confidence = s.confidence;
  cfg.jobs = s.jobs;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!(s.h > cfg.base.radius))
    throw UsageError(fmt::format("h: must exceed R = {} at lambda = {}", num(cfg.base.radius), num(lambda)));
  return cfg;
}

std::string hopcount_header() {
  return "lambda,d,h_over_R,mean_nu,var_nu,norm_mean,vmr_sqrt,ci,bound_lo,bound_hi,asymptote,n_fail\n";
}

std::string hopcount_row(double lambda, const ExperimentConfig& cfg, const HopcountResult& r) {
  const double scale = r.radius / r.h;
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", num(lambda), num(cfg.base.normalized_disk()),
                     num(r.h / r.radius), num(r.nu.mean), num(r.nu.variance), num(r.normalized_mean), num(r.vmr_sqrt),
                     num(r.nu.ci_halfwidth * scale), num(r.bounds->lower * scale), num(r.bounds->upper * scale),
                     num(r.bounds->asymptote * scale), r.n_fail);
}

void append_route_rows(std::string& fields_csv, std::string& routes_csv, double lambda, const HopcountResult& r) {
  for (std::size_t f = 0; f < r.per_field.size(); ++f) {
    const EstimatorResult& e = r.per_field[f];
    fields_csv += fmt::format("{},{},{},{},{},{}\n", num(lambda), f, num(e.mean), num(e.variance), e.n_samples,
                              e.n_failures);
  }
  for (const RouteSample& s : r.routes)
    routes_csv += fmt::format("{},{},{},{},{},{},{}\n", num(lambda), s.field, s.route, status_name(s.status), s.nu,
                              num(s.h), num(s.stretch));
}

int run_gen(const Settings& s, Outputs& outputs, std::ostream& out, std::ostream& err) {
  const NetworkConfig cfg = s.network(s.single_lambda(), err);
  const NodeField field = sample_field(cfg);
  std::ostringstream csv;
  write_field_csv(csv, field);
  outputs.write("field.csv", csv.str());
  out << fmt::format("nodes={} R={}\n", field.size(), num(cfg.radius));
  return kOk;
}

int run_route(const Settings& s, Outputs& outputs, std::ostream& out, std::ostream& err) {
  const double lambda = s.single_lambda();
  const NetworkConfig cfg = s.network(lambda, err);
  ExperimentConfig placement;
  placement.base = cfg;
  placement.h = s.h;
  Point2 src = s.src.value_or(endpoint_positions(placement).first);
  Point2 dst = s.dst.value_or(endpoint_positions(placement).second);
  const double l = cfg.region_radius();
  if (norm(src) > l) throw UsageError("src: outside the network region");
  if (norm(dst) > l) throw UsageError("dst: outside the network region");
  if (src == dst) throw UsageError("dst: must differ from src");
  const std::vector<Point2> pins = {src, dst};
  Rng field_rng = Rng::stream(cfg.seed, {0, 0});
  const NodeField field = sample_field(cfg, field_rng, pins);
  Rng rng = Rng::stream(cfg.seed, {1, 0, 0});
  const SchemeSpec scheme = s.scheme ? SchemeSpec{*s.scheme, s.eta}.normalized() : SchemeSpec::random_disk(s.eta);
  const double h = distance(src, dst);
  const RouteRecord rec = route(field, field.size() - 2, field.size() - 1, scheme, cfg.radius, rng,
                                default_max_hops(h, cfg.radius));
  if (s.trace) {
    std::ostringstream csv;
    write_trace_csv(csv, rec, field);
    outputs.write("trace.csv", csv.str());
  }
  const double stretch = rec.delivered() ? path_stretch(rec, field) : std::nan("");
  outputs.write("route.csv", "lambda,radius,h,status,nu,stretch\n" +
                                 fmt::format("{},{},{},{},{},{}\n", num(lambda), num(cfg.radius), num(h),
                                             status_name(rec.status), rec.nu(), num(stretch)));
  out << fmt::format("status={} nu={} h={} R={}\n", status_name(rec.status), rec.nu(), num(h), num(cfg.radius));
  return kOk;
}

int run_bounds(const Settings& s, Outputs& outputs, std::ostream& out, std::ostream& err) {
  std::string csv = "N,d,eta,sigma_interior,sigma_edge,sigma_total,Enu_lower,Enu_upper,Enu_asym,var_bound,vmr_asym\n";
  const double nan = std::nan("");
  for (double lambda : s.lambdas) {
    const NetworkConfig cfg = s.network(lambda, err);
    const AsymptoticParams p = AsymptoticParams::from_network(lambda, s.area, s.eta, cfg.radius, s.h);
    const bool super = p.d * p.N > 1.0;
    const bool ranged = s.h > cfg.radius;
    const BoundsReport b = ranged ? expected_length_bounds(s.h, cfg.radius) : BoundsReport{nan, nan, nan};
    const double var_bound = ranged ? variance_bounds(s.h, cfg.radius).finite_bound : nan;
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", num(p.N), num(p.d), num(p.eta),
                       num(sigma_interior_bound(p)), num(super ? sigma_edge_bound_auto(p) : nan),
                       num(super ? sigma_total_bound(p) : nan), num(b.lower), num(b.upper), num(b.asymptote),
                       num(var_bound), num(vmr_asymptote()));
    out << fmt::format("lambda={} R={}\n", num(lambda), num(cfg.radius));
  }
  outputs.write("bounds.csv", csv);
  return kOk;
}

int run_experiment(const std::string& kind, const Settings& s, Outputs& outputs, std::ostream& out,
                   std::ostream& err) {
  if (kind == "hopcount" || kind == "edge") {
    const bool edge = kind == "edge";
    std::vector<ExperimentConfig> cfgs;
    for (double lambda : s.lambdas) cfgs.push_back(experiment_config(s, lambda, err, edge));
    std::string main = hopcount_header();
    std::string fields = "lambda,field,mean_nu,var_nu,n_delivered,n_fail\n";
    std::string routes = "lambda,field,route,status,nu,h,stretch\n";
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
      const HopcountResult r = edge ? run_edge_experiment(cfgs[i]) : run_hopcount_experiment(cfgs[i]);
      main += hopcount_row(s.lambdas[i], cfgs[i], r);
      append_route_rows(fields, routes, s.lambdas[i], r);
      out << fmt::format("lambda={} norm_mean={} bounds=[{}, {}]\n", num(s.lambdas[i]), num(r.normalized_mean),
                         num(r.bounds->lower * r.radius / r.h), num(r.bounds->upper * r.radius / r.h));
    }
    outputs.write(kind + ".csv", main);
    outputs.write(kind + "_fields.csv", fields);
    outputs.write(kind + "_routes.csv", routes);
    return kOk;
  }
  if (kind == "variance") {
    std::vector<ExperimentConfig> cfgs;
    for (double lambda : s.lambdas) cfgs.push_back(experiment_config(s, lambda, err, false));
    std::string csv = "lambda,d,h_over_R,mean_nu,var_nu,var_ci,vmr_sqrt,env_lo,env_hi,vmr_asym_sqrt,finite_bound,n_fail\n";
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
      const HopcountResult r = run_hopcount_experiment(cfgs[i]);
      csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", num(s.lambdas[i]),
                         num(cfgs[i].base.normalized_disk()), num(r.h / r.radius), num(r.nu.mean), num(r.nu.variance),
                         num(r.nu.variance_ci_halfwidth), num(r.vmr_sqrt), num(r.variance->envelope_lower()),
                         num(r.variance->envelope_upper()), num(std::sqrt(r.variance->vmr_asymptote)),
                         num(r.variance->finite_bound), r.n_fail);
      out << fmt::format("lambda={} vmr_sqrt={}\n", num(s.lambdas[i]), num(r.vmr_sqrt));
    }
    outputs.write("variance.csv", csv);
    return kOk;
  }
  if (kind == "stretch") {
    std::vector<ExperimentConfig> cfgs;
    for (double lambda : s.lambdas) cfgs.push_back(experiment_config(s, lambda, err, false));
    std::string csv = "lambda,d,h,radius,mean_stretch,var_stretch,ci,stretch_over_h,var_over_Rh,asym_mean,asym_var,n_fail\n";
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
      const HopcountResult r = run_hopcount_experiment(cfgs[i]);
      const StretchAsymptotics a = stretch_asymptotics(r.h, r.radius);
      csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", num(s.lambdas[i]),
                         num(cfgs[i].base.normalized_disk()), num(r.h), num(r.radius), num(r.stretch.mean),
                         num(r.stretch.variance), num(r.stretch.ci_halfwidth), num(r.stretch.mean / r.h),
                         num(r.stretch.variance / (r.radius * r.h)), num(a.mean), num(a.variance), r.n_fail);
      out << fmt::format("lambda={} stretch/h={}\n", num(s.lambdas[i]), num(r.stretch.mean / r.h));
    }
    outputs.write("stretch.csv", csv);
    return kOk;
  }
  if (kind == "connectivity") {
    std::vector<NetworkConfig> cfgs;
    for (double lambda : s.lambdas) cfgs.push_back(s.network(lambda, err));
    std::string csv = "N,d,eta,empirical_fraction,sigma_bound\n";
    for (const NetworkConfig& cfg : cfgs) {
      if (!(cfg.normalized_disk() * cfg.expected_nodes() > 1.0))
        throw UsageError("lambda: connectivity bound needs dN > 1");
      const ConnectivityResult r = run_connectivity_experiment(cfg, s.fields, s.jobs);
      csv += fmt::format("{},{},{},{},{}\n", num(r.params.N), num(r.params.d), num(r.params.eta),
                         num(r.empirical_fraction), num(r.sigma_bound));
      out << fmt::format("N={} fraction={} sigma={}\n", num(r.params.N), num(r.empirical_fraction), num(r.sigma_bound));
    }
    outputs.write("connectivity.csv", csv);
    return kOk;
  }
  if (kind == "markov") {
    ExperimentConfig cfg = experiment_config(s, s.single_lambda(), err, false);
    if (cfg.scheme.kind != SchemeKind::RandomEtaDisk) throw UsageError("scheme: markov needs rdisk");
    const MarkovResult r = markov_overlap_experiment(cfg);
    std::string csv = "bin_lo,bin_hi,rho_hat,area_ratio,lower,upper,n_events\n";
    for (const MarkovBin& b : r.bins)
      csv += fmt::format("{},{},{},{},{},{},{}\n", num(b.lo), num(b.hi), num(b.rho_hat), num(b.area_ratio),
                         num(b.lower), num(b.upper), b.n_events);
    outputs.write("markov.csv", csv);
    outputs.write("markov_pooled.csv", "n_events,n_hits,rho_hat,mean_area_ratio,p_value,n_disjoint\n" +
                                           fmt::format("{},{},{},{},{},{}\n", r.n_events, r.n_hits, num(r.rho_hat),
                                                       num(r.mean_area_ratio), num(r.p_value), r.n_disjoint));
    out << fmt::format("events={} rho_hat={} area_ratio={} p={}\n", r.n_events, num(r.rho_hat),
                       num(r.mean_area_ratio), num(r.p_value));
    return kOk;
  }
  if (kind == "schemes") {
    std::vector<SchemeKind> kinds = {SchemeKind::RandomEtaDisk, SchemeKind::MFR, SchemeKind::NFP, SchemeKind::DIR,
                                     SchemeKind::SRD};
    if (s.scheme) kinds = {*s.scheme};
    std::vector<ExperimentConfig> cfgs;
    for (double lambda : s.lambdas) {
      ExperimentConfig cfg = experiment_config(s, lambda, err, false);
      if (s.h < 2.0 * cfg.base.radius) throw UsageError("h: scheme check needs h >= 2R");
      cfgs.push_back(cfg);
    }
    std::string csv =
        "lambda,scheme,E_x,E_g,var_x,se_x,predicted_mean_nu,sim_mean_nu,mean_dev,predicted_vmr,sim_vmr,vmr_dev,"
        "side_condition,n_fail\n";
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
      for (SchemeKind k : kinds) {
        ExperimentConfig cfg = cfgs[i];
        cfg.scheme = SchemeSpec{k, s.eta}.normalized();
        const SchemeCheck c = scheme_prediction_check(cfg);
        csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", num(s.lambdas[i]), scheme_name(k),
                           num(c.oracle.mean_x), num(c.oracle.mean_g), num(c.oracle.var_x), num(c.oracle.se_x),
                           num(c.predicted_mean_nu), num(c.simulated.nu.mean), num(c.mean_deviation),
                           num(c.predicted_vmr), num(c.simulated_vmr), num(c.vmr_deviation),
                           c.side_condition ? 1 : 0, c.simulated.n_fail);
        out << fmt::format("lambda={} scheme={} mean_dev={}\n", num(s.lambdas[i]), scheme_name(k),
                           num(c.mean_deviation));
      }
    }
    outputs.write("schemes.csv", csv);
    return kOk;
  }
  throw UsageError("experiment: unknown kind '" + kind + "'");
}

}  // namespace

std::vector<double> expand_sweep(std::string_view spec) {
  const std::string text = trim(spec);
  if (text.empty()) throw std::invalid_argument("lambda: empty value");
  auto parse = [](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size() || !(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("lambda: expected a positive number, got '" + t + "'");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    if (b == std::string::npos || text.substr(b + 1) != "log10")
      throw std::invalid_argument("lambda: sweep must be start:stop:log10");
    const double start = parse(trim(text.substr(0, a)));
    const double stop = parse(trim(text.substr(a + 1, b - a - 1)));
    if (stop < start) throw std::invalid_argument("lambda: sweep stop is below start");
    for (int k = 0;; ++k) {
      const double v = start * std::pow(10.0, k);
      if (v > stop * (1.0 + 1e-9)) break;
      out.push_back(v);
    }
    return out;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    out.push_back(parse(trim(text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos))));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometric routing simulator for random wireless networks", "georoute"};
  app.require_subcommand(1);
  KeyMap flag_values;
  std::map<std::string, std::vector<CLI::Option*>> flag_opts;
  std::string config_path;
  std::string out_dir = "out";
  bool trace = false;
  std::string kind;

  app.set_help_flag("--help", "Print this help message and exit");
  auto add_common = [&](CLI::App* sub) {
    // -h is reserved for the distance option.
    sub->set_help_flag("--help", "Print this help message and exit");
    auto opt = [&](const std::string& key, const std::string& help) {
      flag_opts[key].push_back(sub->add_option("--" + key, flag_values[key], help));
    };
    opt("lambda", "Density: value, comma list, or start:stop:log10 sweep");
    opt("area", "Region area |A| (default 1)");
    opt("radius", "Transmission range R");
    opt("c", "Critical-radius constant; R = sqrt((c/pi) log(lambda |A|) / lambda) (default 2 pi)");
    opt("eta", "Selection wedge fraction in (0, 1] (default 0.5)");
    opt("scheme", "Relay rule: rdisk, mfr, nfp, dir, srd");
    opt("h", "Source-destination distance (default sqrt(|A|/2))");
    opt("near-edge", "Place endpoints at this fraction of the region radius");
    opt("fields", "Network realizations");
    opt("routes", "Routes per realization");
    opt("seed", "Base seed (default 1)");
    opt("jobs", "Worker threads (default: all cores)");
    opt("confidence", "Confidence level for intervals (default 0.95)");
    sub->add_option("--config", config_path, "key = value file or a config.json sidecar");
    sub->add_option("--out", out_dir, "Output directory (default ./out)");
  };

  CLI::App* gen = app.add_subcommand("gen", "Sample one network realization to field.csv");
  CLI::App* rte = app.add_subcommand("route", "Route one packet and optionally trace it");
  CLI::App* bnd = app.add_subcommand("bounds", "Tabulate the closed-form bounds");
  CLI::App* exp = app.add_subcommand("experiment", "Run a Monte Carlo experiment");
  for (CLI::App* sub : {gen, rte, bnd, exp}) add_common(sub);
  flag_opts["src"].push_back(rte->add_option("--src", flag_values["src"], "Source position x,y"));
  flag_opts["dst"].push_back(rte->add_option("--dst", flag_values["dst"], "Destination position x,y"));
  rte->add_flag("--trace", trace, "Write the per-hop trace.csv");
  exp->add_option("kind", kind, "hopcount, variance, connectivity, markov, schemes, edge, stretch")
      ->required()
      ->check(CLI::IsMember({"hopcount", "variance", "connectivity", "markov", "schemes", "edge", "stretch"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  std::string command = chosen->get_name();
  if (chosen == exp) command += " " + kind;

  std::unique_ptr<Outputs> outputs;
  Settings settings;
  try {
    KeyMap merged;
    if (!config_path.empty()) merged = read_config_file(config_path);
    for (const auto& [key, opts] : flag_opts)
      for (CLI::Option* o : opts)
        if (o->count() > 0) merged[key] = flag_values[key];
    if (trace) merged["trace"] = "true";
    // Flags given on the command line win over the file, including radius vs c.
    for (const char* pair : {"radius", "c"}) {
      const std::string other = std::string(pair) == "radius" ? "c" : "radius";
      bool flagged = false;
      for (CLI::Option* o : flag_opts[pair]) flagged |= o->count() > 0;
      bool other_flagged = false;
      for (CLI::Option* o : flag_opts[other]) other_flagged |= o->count() > 0;
      if (flagged && !other_flagged) merged.erase(other);
    }
    const bool connectivity = chosen == exp && kind == "connectivity";
    settings = resolve(merged, connectivity ? 100 : 30, connectivity ? 1 : 30);
    outputs = std::make_unique<Outputs>(out_dir, command, settings.canonical());
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }

  try {
    int code = kOk;
    if (chosen == gen) code = run_gen(settings, *outputs, out, err);
    if (chosen == rte) code = run_route(settings, *outputs, out, err);
    if (chosen == bnd) code = run_bounds(settings, *outputs, out, err);
    if (chosen == exp) code = run_experiment(kind, settings, *outputs, out, err);
    outputs->finish();
    return code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace georoute::cli
