// SPDX-License-Identifier: Apache-2.0
#include "latrelay/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace latrelay {
namespace {

constexpr double kNoiselessFloor = 1e-12;

// Strict reader for one JSON object: every key must be consumed.
class Fields {
 public:
  Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw RunError("validation", path_, name("") + "must be an object");
  }

  /// Marks `key` as known; a null value counts as absent.
  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const Json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  std::optional<double> number(const std::string& key) {
    used_.insert(key);
    if (!has(key)) return std::nullopt;
    const Json& v = j_.at(key);
    if (!v.is_number()) throw RunError("validation", full(key), full(key) + ": must be a number");
    return v.get<double>();
  }
  double number_or(const std::string& key, double fallback) { return number(key).value_or(fallback); }
  double require_number(const std::string& key) {
    auto v = number(key);
    if (!v) throw missing(key);
    return *v;
  }

  std::optional<std::int64_t> integer(const std::string& key) {
    used_.insert(key);
    if (!has(key)) return std::nullopt;
    const Json& v = j_.at(key);
    if (!v.is_number_integer()) throw RunError("validation", full(key), full(key) + ": must be an integer");
    return v.get<std::int64_t>();
  }

  std::optional<std::uint64_t> unsigned_integer(const std::string& key) {
    used_.insert(key);
    if (!has(key)) return std::nullopt;
    const Json& v = j_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw RunError("validation", full(key), full(key) + ": must be a non-negative integer");
  }

  std::optional<std::string> string(const std::string& key) {
    used_.insert(key);
    if (!has(key)) return std::nullopt;
    const Json& v = j_.at(key);
    if (!v.is_string()) throw RunError("validation", full(key), full(key) + ": must be a string");
    return v.get<std::string>();
  }
  std::string require_string(const std::string& key) {
    auto v = string(key);
    if (!v) throw missing(key);
    return *v;
  }

  std::optional<bool> boolean(const std::string& key) {
    used_.insert(key);
    if (!has(key)) return std::nullopt;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) throw RunError("validation", full(key), full(key) + ": must be a boolean");
    return v.get<bool>();
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) throw RunError("validation", full(k), "unknown field '" + full(k) + "'");
  }

  std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  RunError missing(const std::string& key) const {
    return RunError("validation", full(key), "missing required field '" + full(key) + "'");
  }

 private:
  std::string name(const std::string& suffix) const { return (path_.empty() ? "config" : path_) + ": " + suffix; }

  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

struct ParamSpec {
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

ParamSpec param_spec(Topology t) {
  switch (t) {
    case Topology::relay: return {{"P", "P_R", "N_R", "N_D"}, {"alpha"}};
    case Topology::two_relay: return {{"P1", "P2", "P3", "N2", "N3", "N4"}, {"alpha1", "beta1", "alpha2", "permutation"}};
    case Topology::twrc: return {{"P1", "P2", "P_R", "N_R", "N1", "N2"}, {"h12", "h21"}};
    case Topology::marc: return {{"P1", "P2", "P_R", "N_R", "N_D"}, {"time_share"}};
  }
  return {};
}

ChannelParams parse_params(const Json& j, Topology topo) {
  Fields f(j, "params");
  ChannelParams p;
  p.topology = topo;
  const ParamSpec spec = param_spec(topo);
  for (const auto& k : spec.required) set_param(p, k, f.require_number(k));
  for (const auto& k : spec.optional) {
    if (k == "permutation") {
      if (auto v = f.integer(k)) p.permutation = static_cast<int>(*v);
    } else if (auto v = f.number(k)) {
      set_param(p, k, *v);
    }
  }
  f.finish();
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    throw RunError("validation", "params." + msg.substr(0, msg.find(':')), "params." + msg);
  }
  return p;
}

Json params_to_json(const ChannelParams& p) {
  Json j = Json::object();
  const ParamSpec spec = param_spec(p.topology);
  for (const auto& k : spec.required) j[k] = get_param(p, k);
  for (const auto& k : spec.optional) {
    if (k == "permutation") {
      j[k] = p.permutation;
    } else {
      const double v = get_param(p, k);
      j[k] = std::isnan(v) ? Json(nullptr) : Json(v);
    }
  }
  return j;
}

bool two_user(Topology t) { return t == Topology::twrc || t == Topology::marc; }

}  // namespace

Json RunError::to_json() const {
  Json e;
  e["kind"] = kind_;
  e["field"] = field_.empty() ? Json(nullptr) : Json(field_);
  e["message"] = what();
  Json j;
  j["error"] = e;
  return j;
}

RunConfig parse_config(const Json& j) {
  Fields top(j, "");
  RunConfig c;
  c.command = top.require_string("command");
  if (c.command != "rates" && c.command != "sweep" && c.command != "simulate")
    throw RunError("validation", "command", "command: expected rates, sweep or simulate, got '" + c.command + "'");
  const std::string topo = top.require_string("topology");
  try {
    c.params.topology = topology_from_string(topo);
  } catch (const std::invalid_argument& e) {
    throw RunError("validation", "topology", e.what());
  }
  if (auto s = top.string("scheme")) c.scheme = *s;
  if (c.scheme != "df" && c.scheme != "cf") throw RunError("validation", "scheme", "scheme: expected df or cf");
  if (c.scheme == "cf" && c.params.topology != Topology::relay)
    throw RunError("validation", "scheme", "scheme: cf is defined for the relay topology only");
  auto seed = top.unsigned_integer("seed");
  if (!seed) throw top.missing("seed");
  c.seed = *seed;
  c.sim.seed = c.seed;
  if (!top.has("params")) throw top.missing("params");
  c.params = parse_params(top.raw("params"), c.params.topology);

  if (top.has("lattice")) {
    Fields f(top.raw("lattice"), "lattice");
    if (auto v = f.string("family")) c.sim.family = *v;
    if (auto v = f.integer("dimension")) c.sim.n = static_cast<int>(*v);
    if (auto v = f.number("list_margin")) c.sim.list_margin = *v;
    if (auto v = f.boolean("list_self_similar")) c.sim.list_self_similar = *v;
    f.finish();
    if (c.sim.family != "e8" && c.sim.family != "cubic")
      throw RunError("validation", "lattice.family", "lattice.family: expected e8 or cubic");
    if (c.sim.n < 1 || (c.sim.family == "e8" && c.sim.n != 8))
      throw RunError("validation", "lattice.dimension", "lattice.dimension: e8 needs 8, cubic needs >= 1");
    if (!(c.sim.list_margin > 0.0))
      throw RunError("validation", "lattice.list_margin", "lattice.list_margin: must be > 0");
  }
  if (c.sim.family == "e8") c.sim.n = 8;

  if (top.has("simulation")) {
    Fields f(top.raw("simulation"), "simulation");
    if (auto v = f.integer("trials")) {
      if (*v < 1) throw RunError("validation", "trials", "trials: must be >= 1");
      c.sim.trials = static_cast<std::uint64_t>(*v);
    }
    if (auto v = f.integer("blocks")) c.sim.blocks = static_cast<int>(*v);
    if (auto v = f.integer("workers")) {
      if (*v < 1) throw RunError("validation", "workers", "workers: must be >= 1");
      c.sim.workers = static_cast<unsigned>(*v);
    }
    if (auto v = f.number("rate")) c.sim.rate = *v;
    if (auto v = f.number("rate1")) c.sim.rate1 = *v;
    if (auto v = f.number("rate2")) c.sim.rate2 = *v;
    c.rate_backoff = f.number("rate_backoff");
    if (auto v = f.string("rate_rounding")) {
      try {
        c.sim.rounding = rate_rounding_from_string(*v);
      } catch (const std::invalid_argument& e) {
        throw RunError("validation", "simulation.rate_rounding", e.what());
      }
    }
    if (auto v = f.integer("decoding_order")) c.sim.decoding_order = static_cast<int>(*v);
    if (auto v = f.boolean("wrong_own_message")) c.sim.wrong_own_message = *v;
    c.sim.distortion = f.number("distortion");
    if (auto v = f.integer("cf_index_bits")) c.sim.cf_index_bits = static_cast<int>(*v);
    if (auto v = f.number("wz_margin")) c.sim.wz_margin = *v;
    c.noise_override = f.number("noise_override");
    // The presence of explicit rates is what matters below.
    const bool single = f.has("rate"), pair = f.has("rate1") && f.has("rate2");
    f.finish();
    if (c.command == "simulate" && !c.rate_backoff) {
      if (two_user(c.params.topology) ? !pair : !single)
        throw RunError("validation", two_user(c.params.topology) ? "simulation.rate1" : "simulation.rate",
                       "simulate: set the rate(s) or simulation.rate_backoff");
    }
  } else if (c.command == "simulate") {
    throw top.missing("simulation");
  }
  const int min_blocks = c.params.topology == Topology::two_relay ? 3 : 2;
  if (c.sim.blocks < min_blocks)
    throw RunError("validation", "blocks", "blocks: must be >= " + std::to_string(min_blocks));
  if (c.sim.decoding_order != 1 && c.sim.decoding_order != 2)
    throw RunError("validation", "simulation.decoding_order", "simulation.decoding_order: must be 1 or 2");
  if (c.noise_override && !(*c.noise_override >= 0.0))
    throw RunError("validation", "simulation.noise_override", "simulation.noise_override: must be >= 0");

  if (top.has("sweep")) {
    Fields f(top.raw("sweep"), "sweep");
    const Json& axes = f.raw("axes");
    if (!axes.is_array()) throw RunError("validation", "sweep.axes", "sweep.axes: must be an array");
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const std::string path = "sweep.axes[" + std::to_string(i) + "]";
      Fields a(axes[i], path);
      SweepAxis ax;
      ax.param = a.require_string("param");
      ax.lo = a.require_number("lo");
      ax.hi = a.number_or("hi", ax.lo);
      ax.steps = static_cast<int>(a.integer("steps").value_or(1));
      a.finish();
      if (ax.steps < 1) throw RunError("validation", path + ".steps", path + ".steps: empty range");
      try {
        get_param(c.params, ax.param);
      } catch (const std::invalid_argument&) {
        throw RunError("validation", path + ".param", path + ".param: unknown parameter '" + ax.param + "'");
      }
      c.axes.push_back(ax);
    }
    f.finish();
  } else if (c.command == "sweep") {
    throw top.missing("sweep");
  }

  if (top.has("wz")) {
    Fields f(top.raw("wz"), "wz");
    c.wz = WzQuery{f.require_number("P"), f.require_number("N1"), f.require_number("N2"), f.require_number("D")};
    f.finish();
    if (!(c.wz->P > 0 && c.wz->N1 > 0 && c.wz->N2 > 0 && c.wz->D > 0))
      throw RunError("validation", "wz", "wz: all values must be > 0");
  }

  if (top.has("lattices")) {
    const Json& l = top.raw("lattices");
    if (!l.is_array()) throw RunError("validation", "lattices", "lattices: must be an array");
    for (std::size_t i = 0; i < l.size(); ++i) {
      try {
        lattice_from_json(l[i]);
      } catch (const RunError&) {
        throw;
      } catch (const std::exception& e) {
        throw RunError("validation", "lattices[" + std::to_string(i) + "]",
                       "lattices[" + std::to_string(i) + "]: " + e.what());
      }
      c.lattices.push_back(l[i]);
    }
  }

  if (top.has("output")) {
    Fields f(top.raw("output"), "output");
    c.output.path = f.string("path");
    c.output.csv_path = f.string("csv_path");
    if (auto v = f.string("format")) c.output.format = *v;
    if (auto v = f.boolean("include_timing")) c.output.include_timing = *v;
    f.finish();
    if (c.output.format != "json" && c.output.format != "csv")
      throw RunError("validation", "output.format", "output.format: expected json or csv");
  }
  top.finish();
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') ++line, col = 1;
      else ++col;
    }
    throw RunError("parse", "",
                   "parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
  return parse_config(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RunError("io", "", "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

Json config_to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["topology"] = to_string(c.params.topology);
  j["scheme"] = c.scheme;
  j["seed"] = c.seed;
  j["params"] = params_to_json(c.params);
  j["lattice"] = {{"family", c.sim.family},
                  {"dimension", c.sim.n},
                  {"list_margin", c.sim.list_margin},
                  {"list_self_similar", c.sim.list_self_similar}};
  Json s;
  s["trials"] = c.sim.trials;
  s["blocks"] = c.sim.blocks;
  s["rate"] = c.sim.rate;
  s["rate1"] = c.sim.rate1;
  s["rate2"] = c.sim.rate2;
  s["rate_backoff"] = c.rate_backoff ? Json(*c.rate_backoff) : Json(nullptr);
  s["rate_rounding"] = to_string(c.sim.rounding);
  s["decoding_order"] = c.sim.decoding_order;
  s["wrong_own_message"] = c.sim.wrong_own_message;
  s["distortion"] = c.sim.distortion ? Json(*c.sim.distortion) : Json(nullptr);
  s["cf_index_bits"] = c.sim.cf_index_bits ? Json(*c.sim.cf_index_bits) : Json(nullptr);
  s["wz_margin"] = c.sim.wz_margin;
  s["noise_override"] = c.noise_override ? Json(*c.noise_override) : Json(nullptr);
  j["simulation"] = s;
  Json axes = Json::array();
  for (const auto& a : c.axes) axes.push_back({{"param", a.param}, {"lo", a.lo}, {"hi", a.hi}, {"steps", a.steps}});
  j["sweep"] = {{"axes", axes}};
  j["wz"] = c.wz ? Json{{"P", c.wz->P}, {"N1", c.wz->N1}, {"N2", c.wz->N2}, {"D", c.wz->D}} : Json(nullptr);
  j["lattices"] = c.lattices.empty() ? Json::array() : Json(c.lattices);
  return j;
}

Lattice lattice_from_json(const Json& d) {
  Fields f(d, "lattice");
  const std::string kind = f.require_string("kind");
  Lattice out = Lattice::integer_scaled(1, 1.0);
  if (kind == "integer_scaled") {
    out = Lattice::integer_scaled(static_cast<int>(f.integer("dimension").value_or(1)), f.number_or("scale", 1.0));
  } else if (kind == "diagonal") {
    const Json& steps = f.raw("steps");
    if (!steps.is_array()) throw RunError("validation", "lattice.steps", "lattice.steps: must be an array");
    out = Lattice::diagonal(steps.get<std::vector<double>>());
  } else if (kind == "construction_a") {
    auto dim = f.integer("dimension");
    auto modulus = f.integer("modulus");
    if (!dim) throw f.missing("dimension");
    if (!modulus) throw f.missing("modulus");
    const Json& rows = f.raw("code_rows");
    if (!rows.is_array()) throw RunError("validation", "lattice.code_rows", "lattice.code_rows: must be an array");
    out = Lattice::construction_a(static_cast<int>(*modulus), rows.get<std::vector<std::vector<int>>>(),
                                  static_cast<int>(*dim), f.number_or("scale", 1.0));
  } else {
    throw RunError("validation", "lattice.kind", "lattice.kind: unknown kind '" + kind + "'");
  }
  f.finish();
  return out;
}

RatePoint theorem_rates(const std::string& scheme, const ChannelParams& p, int decoding_order) {
  switch (p.topology) {
    case Topology::relay: return scheme == "cf" ? cf_rate(p) : df_rate(p);
    case Topology::two_relay: return df_two_relay_rate(p);
    case Topology::twrc: return twrc_region(p);
    case Topology::marc: return marc_corner(p, decoding_order);
  }
  throw std::invalid_argument("unknown topology");
}

Json rate_point_to_json(const RatePoint& r) {
  Json j;
  j["bound"] = r.bound;
  j["R"] = r.R;
  j["R1"] = r.R1;
  j["R2"] = r.R2;
  Json a = Json::object();
  for (const auto& [k, v] : r.args) a[k] = std::isfinite(v) ? Json(v) : Json(nullptr);
  j["args"] = a;
  return j;
}

Json report_to_json(const SimReport& r) {
  Json j;
  j["scheme"] = r.scheme;
  j["topology"] = to_string(r.topology);
  j["n"] = r.n;
  j["blocks"] = r.blocks;
  j["trials"] = r.trials;
  j["rate_factor"] = r.rate_factor;
  j["error_rate"] = r.error_rate;
  j["messages"] = r.messages;
  j["message_errors"] = r.message_errors;
  Json rates = Json::array();
  for (const auto& x : r.rates)
    rates.push_back({{"name", x.name},
                     {"requested", x.requested},
                     {"realized", x.realized},
                     {"effective", x.realized * r.rate_factor},
                     {"codebook_size", x.codebook_size}});
  j["rates"] = rates;
  Json stages = Json::array();
  for (const auto& s : r.stages)
    stages.push_back({{"name", s.name},
                      {"decisions", s.decisions},
                      {"errors", s.errors},
                      {"error_rate", s.error_rate()},
                      {"misses", s.misses},
                      {"ambiguities", s.ambiguities},
                      {"empty", s.empty},
                      {"configured_list_size", s.configured_list_size},
                      {"mean_list_size", s.mean_list_size}});
  j["stages"] = stages;
  Json lat = Json::array();
  for (const auto& l : r.lattices)
    lat.push_back({{"role", l.role},
                   {"description", l.description},
                   {"level", l.level},
                   {"volume", l.volume},
                   {"second_moment", l.second_moment}});
  j["lattices"] = lat;
  Json pw = Json::array();
  for (const auto& p : r.powers)
    pw.push_back({{"node", p.node}, {"budget", p.budget}, {"mean", p.mean}, {"max_block", p.max_block}});
  j["powers"] = pw;
  j["distortion_configured"] = r.distortion_configured ? Json(*r.distortion_configured) : Json(nullptr);
  j["distortion_measured"] = r.distortion_measured ? Json(*r.distortion_measured) : Json(nullptr);
  Json diag = Json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = std::isfinite(v) ? Json(v) : Json(nullptr);
  j["diagnostics"] = diag;
  return j;
}

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json rates_payload(const RunConfig& c) {
  const ChannelParams& p = c.params;
  Json j;
  switch (p.topology) {
    case Topology::relay:
      j["df"] = rate_point_to_json(df_rate(p));
      j["cf"] = rate_point_to_json(cf_rate(p));
      j["cutset"] = rate_point_to_json(relay_cutset(p));
      break;
    case Topology::two_relay:
      j["df"] = rate_point_to_json(df_two_relay_rate(p));
      j["cutset"] = rate_point_to_json(two_relay_cutset(p));
      break;
    case Topology::twrc:
      j["df"] = rate_point_to_json(twrc_region(p));
      j["cutset"] = rate_point_to_json(cutset_twrc(p));
      break;
    case Topology::marc:
      j["order1"] = rate_point_to_json(marc_corner(p, 1));
      j["order2"] = rate_point_to_json(marc_corner(p, 2));
      j["time_shared"] = rate_point_to_json(marc_point(p, p.time_share));
      j["cutset"] = rate_point_to_json(marc_cutset(p));
      break;
  }
  if (c.wz) {
    const WzRate w = wz_rate(c.wz->P, c.wz->N1, c.wz->N2, c.wz->D);
    j["wz"] = {{"lattice", w.lattice}, {"classical", w.classical}};
  }
  if (!c.lattices.empty()) {
    Json arr = Json::array();
    for (std::size_t i = 0; i < c.lattices.size(); ++i) {
      const Lattice l = lattice_from_json(c.lattices[i]);
      Rng rng(tagged_seed(c.seed, StreamTag::stats, i));
      const VoronoiStats st = voronoi_stats(l, 20000, rng);
      arr.push_back({{"description", l.describe()},
                     {"dimension", l.dim()},
                     {"volume", l.volume()},
                     {"second_moment", st.second_moment},
                     {"normalized_second_moment", st.normalized_second_moment},
                     {"r_eff", st.r_eff}});
    }
    j["lattices"] = arr;
  }
  return j;
}

std::string csv_destination(const RunConfig& c) {
  if (c.output.csv_path) return *c.output.csv_path;
  if (c.output.format != "csv") return {};
  const std::string rec = record_path(c);
  if (rec.empty()) return {};
  return std::filesystem::path(rec).replace_extension(".csv").string();
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw RunError("io", "output.path", "cannot write '" + path + "'");
  out << text;
}

}  // namespace

Json run(const RunConfig& c) {
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  Json payload;
  std::vector<std::pair<std::string, std::uint64_t>> codebook_seeds;
  std::uint64_t trial_streams = 0;

  try {
    if (c.command == "rates") {
      payload = rates_payload(c);
    } else if (c.command == "sweep") {
      const std::string csv = region_sweep(c.params, c.axes, c.sim.workers);
      std::size_t rows = 0;
      for (char ch : csv) rows += ch == '\n';
      payload["rows"] = rows - 1;
      payload["csv"] = csv;
      const std::string dest = csv_destination(c);
      if (!dest.empty()) write_file(dest, csv);
    } else {
      ChannelParams p = c.params;
      if (c.noise_override) {
        // Rate formulas need N > 0, so "noiseless" becomes a negligible floor.
        const double v = std::max(*c.noise_override, kNoiselessFloor);
        for (double* f : {&p.N_R, &p.N_D, &p.N1, &p.N2, &p.N3, &p.N4}) *f = v;
      }
      SimOptions opt = c.sim;
      if (c.rate_backoff) {
        const RatePoint th = theorem_rates(c.scheme, c.params, opt.decoding_order);
        const double f = 1.0 + *c.rate_backoff;
        if (two_user(p.topology)) opt.rate1 = f * th.R1, opt.rate2 = f * th.R2;
        else opt.rate = f * th.R;
        payload["theorem_rate"] = rate_point_to_json(th);
      }
      const SimReport rep = simulate(c.scheme, p, opt);
      payload["report"] = report_to_json(rep);
      codebook_seeds = rep.codebook_seeds;
      trial_streams = rep.trials;
    }
  } catch (const RunError&) {
    throw;
  } catch (const std::domain_error& e) {
    const std::string msg = e.what();
    throw RunError("domain", "simulation." + msg.substr(0, msg.find(':')), msg);
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    throw RunError("validation", colon == std::string::npos ? "" : msg.substr(0, colon), msg);
  }

  Json rec;
  rec["artifact"] = kArtifactName;
  rec["version"] = kArtifactVersion;
  rec["command"] = c.command;
  rec["config"] = config_to_json(c);
  rec["payload"] = payload;
  Json sub;
  sub["master_seed"] = c.seed;
  sub["derivation"] = "stream = splitmix64(splitmix64(master ^ tag) + index); tags: trial=1, codebook=2, stats=3";
  sub["trial_streams"] = trial_streams;
  Json seeds = Json::object();
  for (const auto& [role, s] : codebook_seeds) seeds[role] = s;
  sub["codebook_seeds"] = seeds;
  rec["substreams"] = sub;
  if (c.output.include_timing) {
    rec["execution"] = {{"workers", c.sim.workers},
                        {"started", started},
                        {"finished", utc_now()},
                        {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  }
  return rec;
}

std::string record_text(const Json& record) { return record.dump(2) + "\n"; }

std::string record_path(const RunConfig& c) {
  if (c.output.path) return *c.output.path;
  if (const char* dir = std::getenv("LATRELAY_OUT_DIR"); dir && *dir)
    return (std::filesystem::path(dir) / (c.command + ".json")).string();
  return {};
}

void write_record(const RunConfig& c, const Json& record) {
  const std::string path = record_path(c);
  if (path.empty()) throw RunError("io", "output.path", "no output path");
  write_file(path, record_text(record));
}

}  // namespace latrelay
