#include "mchom/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "mchom/errors.hpp"

namespace mchom {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> known) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError(fmt::format("{}{}: unknown field", where.empty() ? "" : where + ".", key));
    }
  }
}

std::string path_of(const std::string& where, const char* key) {
  return where.empty() ? key : where + "." + key;
}

const json& object_at(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(fmt::format("{}: expected an object", where.empty() ? "config" : where));
  return j;
}

double number(const json& j, const std::string& where, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(fmt::format("{}: expected a number", path_of(where, key)));
  return v.get<double>();
}

int integer(const json& j, const std::string& where, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(fmt::format("{}: expected an integer", path_of(where, key)));
  return v.get<int>();
}

std::string text(const json& j, const std::string& where, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(fmt::format("{}: expected a string", path_of(where, key)));
  return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError(fmt::format("{}: expected a number or an array of numbers", where));
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(fmt::format("{}: expected numbers", where));
    out.push_back(x.get<double>());
  }
  return out;
}

FieldSpec parse_field(const json& j, const std::string& where) {
  object_at(j, where);
  reject_unknown(j, where, {"kind", "amplitude", "rate", "center", "value"});
  FieldSpec f;
  f.kind = text(j, where, "kind", "zero");
  f.amplitude = number(j, where, "amplitude", f.amplitude);
  f.rate = number(j, where, "rate", f.rate);
  f.value = number(j, where, "value", f.value);
  if (j.contains("center")) {
    const auto c = numbers(j.at("center"), where + ".center");
    if (c.size() != 2) throw ConfigError(where + ".center: expected two coordinates");
    f.center = {c[0], c[1]};
  }
  if (f.kind != "gaussian" && f.kind != "constant" && f.kind != "zero") {
    throw ConfigError(fmt::format("{}.kind: '{}' is not one of gaussian, constant, zero", where, f.kind));
  }
  if (f.kind == "gaussian" && !(f.rate >= 0.0)) throw ConfigError(where + ".rate: must be nonnegative");
  return f;
}

json field_json(const FieldSpec& f) {
  if (f.kind == "gaussian") {
    return {{"kind", f.kind}, {"amplitude", f.amplitude}, {"rate", f.rate}, {"center", {f.center.x, f.center.y}}};
  }
  if (f.kind == "constant") return {{"kind", f.kind}, {"value", f.value}};
  return {{"kind", f.kind}};
}

}  // namespace

std::function<double(Point)> FieldSpec::function() const {
  if (kind == "gaussian") {
    return [a = amplitude, r = rate, c = center](Point p) {
      const double dx = p.x - c.x;
      const double dy = p.y - c.y;
      return a * std::exp(-r * (dx * dx + dy * dy));
    };
  }
  if (kind == "constant") return [v = value](Point) { return v; };
  return [](Point) { return 0.0; };
}

std::function<double(double)> TimeProfileSpec::function() const {
  if (kind == "power") return [s = scale, e = exponent](double t) { return s * std::pow(t, e); };
  return [s = scale](double) { return s; };
}

const std::vector<std::string>& run_modes() {
  static const std::vector<std::string> modes{"fine", "cells", "upscale", "macro", "compare", "full", "zero-order"};
  return modes;
}

void RunConfig::validate() const {
  if (name.empty()) throw ConfigError("name: must not be empty");
  if (nx < 1 || ny < 1) throw ConfigError("fine: nx and ny must be positive");
  if (M < 1) throw ConfigError("coarse.M: must be positive");
  if (nx % M != 0 || ny % M != 0) throw ConfigError(fmt::format("coarse.M: {} does not divide the fine grid {}x{}", M, nx, ny));
  if (M < 2 && layers < 0) throw ConfigError("coarse.layers: required when M = 1");
  if (std::find(run_modes().begin(), run_modes().end(), mode) == run_modes().end()) {
    throw ConfigError(fmt::format("mode: '{}' is not a known mode", mode));
  }
  const int N = medium.kind == "homogeneous" ? 1 : 2;
  if (medium.kind != "raster" && alphas.size() > 1 && static_cast<int>(alphas.size()) != N) {
    throw ConfigError(fmt::format("alpha: {} orders given for {} continua", alphas.size(), N));
  }
  if (medium.kind == "crossed" && !(medium.crossed.low > 0.0 && medium.crossed.high > 0.0)) {
    throw ConfigError("medium: coefficient values must be positive");
  }
  if (medium.kind == "layered" && !(medium.layered.low > 0.0 && medium.layered.high > 0.0)) {
    throw ConfigError("medium: coefficient values must be positive");
  }
  if (medium.kind == "homogeneous" && !(medium.value > 0.0)) throw ConfigError("medium.value: must be positive");
  if (medium.kind == "raster" && medium.raster.empty()) throw ConfigError("medium.path: required for a raster medium");
  for (double a : zero_order_values) {
    if (!(a > 0.0)) throw ConfigError("zero_order.A: values must be positive");
  }
  if (source_time.kind != "constant" && source_time.kind != "power") {
    throw ConfigError(fmt::format("source.time.kind: '{}' is not one of constant, power", source_time.kind));
  }
  transient().validate();
}

TransientSettings RunConfig::transient() const {
  TransientSettings s;
  s.alphas = alphas;
  s.tau = tau;
  s.final_time = final_time;
  s.boundary = boundary;
  s.snapshot_times = snapshots;
  return s;
}

SourceTerm RunConfig::source_term() const { return {source.function(), source_time.function()}; }

int RunConfig::effective_layers() const { return layers >= 0 ? layers : oversampling_layers(1.0 / M); }

RunConfig parse_config(const json& j) {
  object_at(j, "");
  reject_unknown(j, "", {"name", "medium", "fine", "coarse", "alpha", "tau", "T", "source", "u0", "psi", "boundary",
                         "mode", "output", "snapshots", "zero_order"});
  RunConfig c;
  c.name = text(j, "", "name", c.name);

  if (j.contains("medium")) {
    const json& m = object_at(j.at("medium"), "medium");
    c.medium.kind = text(m, "medium", "kind", c.medium.kind);
    if (c.medium.kind == "crossed") {
      reject_unknown(m, "medium", {"kind", "period", "width", "offset", "low", "high"});
      auto& g = c.medium.crossed;
      g.period = number(m, "medium", "period", g.period);
      g.width = number(m, "medium", "width", g.width);
      g.offset = number(m, "medium", "offset", g.offset);
      g.low = number(m, "medium", "low", g.low);
      g.high = number(m, "medium", "high", g.high);
    } else if (c.medium.kind == "layered") {
      reject_unknown(m, "medium", {"kind", "stripes", "width", "offset", "low", "high"});
      auto& g = c.medium.layered;
      g.stripes = integer(m, "medium", "stripes", g.stripes);
      g.width = number(m, "medium", "width", g.width);
      g.offset = number(m, "medium", "offset", g.offset);
      g.low = number(m, "medium", "low", g.low);
      g.high = number(m, "medium", "high", g.high);
    } else if (c.medium.kind == "homogeneous") {
      reject_unknown(m, "medium", {"kind", "value"});
      c.medium.value = number(m, "medium", "value", c.medium.value);
    } else if (c.medium.kind == "raster") {
      reject_unknown(m, "medium", {"kind", "path"});
      c.medium.raster = text(m, "medium", "path", "");
    } else {
      throw ConfigError(fmt::format("medium.kind: '{}' is not one of crossed, layered, homogeneous, raster",
                                    c.medium.kind));
    }
  }

  if (j.contains("fine")) {
    const json& f = object_at(j.at("fine"), "fine");
    reject_unknown(f, "fine", {"nx", "ny"});
    c.nx = integer(f, "fine", "nx", c.nx);
    c.ny = integer(f, "fine", "ny", c.ny);
  }
  if (j.contains("coarse")) {
    const json& g = object_at(j.at("coarse"), "coarse");
    reject_unknown(g, "coarse", {"M", "layers", "extension", "load"});
    c.M = integer(g, "coarse", "M", c.M);
    c.layers = integer(g, "coarse", "layers", c.layers);
    const std::string ext = text(g, "coarse", "extension", "mirror");
    if (ext == "mirror") {
      c.extension = RegionExtension::Mirror;
    } else if (ext == "clip") {
      c.extension = RegionExtension::Clip;
    } else {
      throw ConfigError(fmt::format("coarse.extension: '{}' is not one of mirror, clip", ext));
    }
    const std::string load = text(g, "coarse", "load", "block");
    if (load == "block") {
      c.load = MacroLoad::Block;
    } else if (load == "midpoint") {
      c.load = MacroLoad::Midpoint;
    } else {
      throw ConfigError(fmt::format("coarse.load: '{}' is not one of block, midpoint", load));
    }
  }

  if (j.contains("alpha")) c.alphas = numbers(j.at("alpha"), "alpha");
  c.tau = number(j, "", "tau", c.tau);
  c.final_time = number(j, "", "T", c.final_time);

  if (j.contains("source")) {
    json s = object_at(j.at("source"), "source");
    if (s.contains("time")) {
      const json& t = object_at(s.at("time"), "source.time");
      reject_unknown(t, "source.time", {"kind", "scale", "exponent"});
      c.source_time.kind = text(t, "source.time", "kind", c.source_time.kind);
      c.source_time.scale = number(t, "source.time", "scale", c.source_time.scale);
      c.source_time.exponent = number(t, "source.time", "exponent", c.source_time.exponent);
      s.erase("time");
    }
    c.source = parse_field(s, "source");
  }
  if (j.contains("u0")) c.initial_value = parse_field(j.at("u0"), "u0");
  if (j.contains("psi")) c.initial_velocity = parse_field(j.at("psi"), "psi");

  const std::string bc = text(j, "", "boundary", "dirichlet0");
  if (bc == "dirichlet0") {
    c.boundary = BoundaryCondition::Dirichlet0;
  } else if (bc == "neumann0") {
    c.boundary = BoundaryCondition::Neumann0;
  } else {
    throw ConfigError(fmt::format("boundary: '{}' is not one of dirichlet0, neumann0", bc));
  }

  c.mode = text(j, "", "mode", c.mode);
  c.output = text(j, "", "output", c.output.string());
  if (j.contains("snapshots")) c.snapshots = numbers(j.at("snapshots"), "snapshots");
  if (j.contains("zero_order")) {
    const json& z = object_at(j.at("zero_order"), "zero_order");
    reject_unknown(z, "zero_order", {"A"});
    if (z.contains("A")) c.zero_order_values = numbers(z.at("A"), "zero_order.A");
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(is, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json medium{{"kind", c.medium.kind}};
  if (c.medium.kind == "crossed") {
    const auto& g = c.medium.crossed;
    medium.update({{"period", g.period}, {"width", g.width}, {"offset", g.offset}, {"low", g.low}, {"high", g.high}});
  } else if (c.medium.kind == "layered") {
    const auto& g = c.medium.layered;
    medium.update({{"stripes", g.stripes}, {"width", g.width}, {"offset", g.offset}, {"low", g.low}, {"high", g.high}});
  } else if (c.medium.kind == "homogeneous") {
    medium["value"] = c.medium.value;
  } else {
    medium["path"] = c.medium.raster.string();
  }
  json source = field_json(c.source);
  source["time"] = {{"kind", c.source_time.kind}, {"scale", c.source_time.scale}, {"exponent", c.source_time.exponent}};
  return {
      {"name", c.name},
      {"medium", medium},
      {"fine", {{"nx", c.nx}, {"ny", c.ny}}},
      {"coarse",
       {{"M", c.M},
        {"layers", c.layers},
        {"extension", c.extension == RegionExtension::Mirror ? "mirror" : "clip"},
        {"load", c.load == MacroLoad::Block ? "block" : "midpoint"}}},
      {"alpha", c.alphas},
      {"tau", c.tau},
      {"T", c.final_time},
      {"source", source},
      {"u0", field_json(c.initial_value)},
      {"psi", field_json(c.initial_velocity)},
      {"boundary", c.boundary == BoundaryCondition::Dirichlet0 ? "dirichlet0" : "neumann0"},
      {"mode", c.mode},
      {"output", c.output.string()},
      {"snapshots", c.snapshots},
      {"zero_order", {{"A", c.zero_order_values}}},
  };
}

}  // namespace mchom
