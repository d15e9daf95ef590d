// Copyright 2026 The rydprep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rydprep/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace rydprep::cli {

namespace {

enum class Dim { Frequency, Time, Length, Temperature, Power, Wavenumber };

struct UnitSuffix {
  const char* suffix;
  Dim dim;
  double scale;  // relative to the smallest-named unit of the same dimension
};

// Scales are in a common base per dimension; only ratios matter.
constexpr UnitSuffix kUnits[] = {
    {"ghz", Dim::Frequency, 1e9},    {"mhz", Dim::Frequency, 1e6},   {"khz", Dim::Frequency, 1e3},
    {"hz", Dim::Frequency, 1.0},     {"s", Dim::Time, 1.0},          {"ms", Dim::Time, 1e-3},
    {"us", Dim::Time, 1e-6},         {"ns", Dim::Time, 1e-9},        {"m", Dim::Length, 1.0},
    {"mm", Dim::Length, 1e-3},       {"um", Dim::Length, 1e-6},      {"nm", Dim::Length, 1e-9},
    {"k", Dim::Temperature, 1.0},    {"mk", Dim::Temperature, 1e-3}, {"uk", Dim::Temperature, 1e-6},
    {"nk", Dim::Temperature, 1e-9},  {"w", Dim::Power, 1.0},         {"mw", Dim::Power, 1e-3},
    {"uw", Dim::Power, 1e-6},        {"rad_per_m", Dim::Wavenumber, 1.0},
    {"rad_per_um", Dim::Wavenumber, 1e6},
};

const UnitSuffix* find_unit(std::string_view suffix) {
  for (const auto& u : kUnits) {
    if (suffix == u.suffix) return &u;
  }
  return nullptr;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Line of the last component of a dotted path, found by scanning for quoted
// keys in order. Best effort: returns 0 when not found.
std::size_t locate_line(const std::string& text, const std::string& path) {
  if (text.empty()) return 0;
  std::size_t pos = 0;
  std::size_t start = 0;
  std::size_t found = std::string::npos;
  while (start <= path.size()) {
    std::size_t end = path.find('.', start);
    if (end == std::string::npos) end = path.size();
    std::string key = path.substr(start, end - start);
    const std::size_t bracket = key.find('[');
    if (bracket != std::string::npos) key = key.substr(0, bracket);
    if (!key.empty()) {
      const std::size_t hit = text.find("\"" + key + "\"", pos);
      if (hit == std::string::npos) break;
      found = hit;
      pos = hit + key.size() + 2;
    }
    start = end + 1;
  }
  if (found == std::string::npos) return 0;
  return static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(found), '\n')) + 1;
}

class Reader {
 public:
  Reader(const Json& obj, std::string path, const std::string& text) : obj_(obj), path_(std::move(path)), text_(text) {
    if (!obj_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    std::ostringstream msg;
    msg << "config field '" << field << "'";
    if (const std::size_t line = locate_line(text_, field)) msg << " (line " << line << ")";
    msg << ": " << what;
    throw ConfigError(msg.str());
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const Json* take(const std::string& key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  double number(const std::string& key, double def) {
    const Json* v = take(key);
    if (!v) return def;
    return as_number(*v, field(key));
  }

  double as_number(const Json& v, const std::string& f) const {
    if (!v.is_number()) fail(f, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(f, "must be finite");
    return x;
  }

  std::size_t count(const std::string& key, std::size_t def) {
    const Json* v = take(key);
    if (!v) return def;
    if (!v->is_number_integer() || v->get<long long>() < 0) fail(field(key), "expected a non-negative integer");
    return v->get<std::size_t>();
  }

  int integer(const std::string& key, int def) {
    const Json* v = take(key);
    if (!v) return def;
    if (!v->is_number_integer()) fail(field(key), "expected an integer");
    return v->get<int>();
  }

  bool boolean(const std::string& key, bool def) {
    const Json* v = take(key);
    if (!v) return def;
    if (!v->is_boolean()) fail(field(key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& def) {
    const Json* v = take(key);
    if (!v) return def;
    if (!v->is_string()) fail(field(key), "expected a string");
    return v->get<std::string>();
  }

  std::string choice(const std::string& key, const std::string& def, std::initializer_list<const char*> allowed) {
    const std::string v = upper(string(key, def));
    for (const char* a : allowed) {
      if (v == a) return v;
    }
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    fail(field(key), "'" + v + "' is not one of " + list);
  }

  std::vector<std::string> strings(const std::string& key) {
    const Json* v = take(key);
    std::vector<std::string> out;
    if (!v) return out;
    if (!v->is_array()) fail(field(key), "expected a list of strings");
    for (const auto& e : *v) {
      if (!e.is_string()) fail(field(key), "expected a list of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> def) {
    const Json* v = take(key);
    if (!v) return def;
    if (!v->is_array()) fail(field(key), "expected a list of numbers");
    std::vector<double> out;
    for (const auto& e : *v) out.push_back(as_number(e, field(key)));
    return out;
  }

  // Finds base_<suffix> with a suffix of the canonical unit's dimension and
  // converts to the canonical unit.
  const Json* quantity_key(const std::string& base, const char* canonical, double& factor, std::string& key_out) {
    const UnitSuffix* want = find_unit(canonical);
    const Json* hit = nullptr;
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      const std::string& key = it.key();
      if (key.size() <= base.size() + 1 || key.compare(0, base.size() + 1, base + "_") != 0) continue;
      const UnitSuffix* u = find_unit(std::string_view(key).substr(base.size() + 1));
      if (!u) continue;
      if (u->dim != want->dim) fail(field(key), std::string("unit '") + u->suffix + "' has the wrong dimension, use _" + canonical);
      if (hit) fail(field(key), "given twice with different units");
      hit = &*it;
      key_out = key;
      factor = u->scale / want->scale;
    }
    if (hit) used_.insert(key_out);
    return hit;
  }

  double quantity(const std::string& base, const char* canonical, double def) {
    double factor = 1.0;
    std::string key;
    const Json* v = quantity_key(base, canonical, factor, key);
    if (!v) return def;
    return as_number(*v, field(key)) * factor;
  }

  std::vector<double> quantity_list(const std::string& base, const char* canonical, std::vector<double> def) {
    double factor = 1.0;
    std::string key;
    const Json* v = quantity_key(base, canonical, factor, key);
    if (!v) return def;
    if (!v->is_array()) fail(field(key), "expected a list of numbers");
    std::vector<double> out;
    for (const auto& e : *v) out.push_back(as_number(e, field(key)) * factor);
    return out;
  }

  std::map<std::string, double> quantity_map(const std::string& base, const char* canonical) {
    double factor = 1.0;
    std::string key;
    const Json* v = quantity_key(base, canonical, factor, key);
    std::map<std::string, double> out;
    if (!v) return out;
    if (!v->is_object()) fail(field(key), "expected an object of numbers");
    for (auto it = v->begin(); it != v->end(); ++it) out[it.key()] = as_number(*it, field(key) + "." + it.key()) * factor;
    return out;
  }

  std::array<double, 3> triple(const std::string& key, std::array<double, 3> def) {
    const Json* v = take(key);
    if (!v) return def;
    if (!v->is_array() || v->size() != 3) fail(field(key), "expected three numbers");
    return {as_number((*v)[0], field(key)), as_number((*v)[1], field(key)), as_number((*v)[2], field(key))};
  }

  Reader child(const std::string& key) {
    const Json* v = take(key);
    static const Json kEmpty = Json::object();
    return Reader(v ? *v : kEmpty, field(key), text_);
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!used_.count(it.key())) fail(field(it.key()), "unknown field");
    }
  }

  const std::string& path() const { return path_; }
  const std::string& text() const { return text_; }

 private:
  const Json& obj_;
  std::string path_;
  const std::string& text_;
  std::set<std::string> used_;
};

SegmentConfig read_segment(Reader& r) {
  SegmentConfig s;
  s.kind = r.choice("kind", "PULSE", {"PULSE", "RELAX", "MICROWAVE"});
  s.label = r.string("label", "");
  s.duration_us = r.quantity("duration", "us", 0.0);
  if (s.kind == "PULSE") {
    s.source = r.choice("source", "G", {"G", "E", "PLUS"});
    s.rabi_mhz = r.quantity("rabi", "mhz", 0.0);
    s.detuning_mhz = r.quantity("detuning", "mhz", 0.0);
    s.envelope = r.choice("envelope", "SQUARE", {"SQUARE", "GAUSSIAN"});
    s.sigma_us = r.quantity("sigma", "us", 0.0);
    s.phases = r.numbers("phases", {});
    s.frame = r.choice("frame", "STATIC", {"STATIC", "OSCILLATING"});
    s.square_duration_us = r.quantity("square_duration", "us", 0.0);
    if (const Json* pairs = r.take("interaction")) {
      if (!pairs->is_array()) r.fail(r.field("interaction"), "expected a list of pairs");
      for (std::size_t k = 0; k < pairs->size(); ++k) {
        Reader pr((*pairs)[k], r.field("interaction") + "[" + std::to_string(k) + "]", r.text());
        PairConfig p;
        p.i = pr.count("i", 0);
        p.j = pr.count("j", 1);
        p.u_mhz = pr.quantity("u", "mhz", 0.0);
        pr.finish();
        s.interaction.push_back(p);
      }
    }
  } else if (s.kind == "RELAX") {
    s.include_h = r.boolean("include_h", false);
  } else {
    s.omega_c_khz = r.quantity("omega_c", "khz", 0.0);
  }
  r.finish();
  return s;
}

Json segment_json(const SegmentConfig& s) {
  Json j{{"kind", s.kind}, {"label", s.label}, {"duration_us", s.duration_us}};
  if (s.kind == "PULSE") {
    j["source"] = s.source;
    j["rabi_mhz"] = s.rabi_mhz;
    j["detuning_mhz"] = s.detuning_mhz;
    j["envelope"] = s.envelope;
    j["sigma_us"] = s.sigma_us;
    j["phases"] = s.phases;
    j["frame"] = s.frame;
    j["square_duration_us"] = s.square_duration_us;
    Json pairs = Json::array();
    for (const auto& p : s.interaction) pairs.push_back({{"i", p.i}, {"j", p.j}, {"u_mhz", p.u_mhz}});
    j["interaction"] = pairs;
  } else if (s.kind == "RELAX") {
    j["include_h"] = s.include_h;
  } else {
    j["omega_c_khz"] = s.omega_c_khz;
  }
  return j;
}

FullConfig read_full(Reader r) {
  FullConfig f;
  f.omega_a1_mhz = r.quantity("omega_a1", "mhz", f.omega_a1_mhz);
  f.omega_a2_mhz = r.quantity("omega_a2", "mhz", f.omega_a2_mhz);
  f.delta_mhz = r.quantity("delta", "mhz", f.delta_mhz);
  f.light_shift_compensation = r.boolean("light_shift_compensation", f.light_shift_compensation);
  f.gamma_p1_mhz = r.quantity("gamma_p1", "mhz", f.gamma_p1_mhz);
  f.r_lifetime_us = r.quantity("r_lifetime", "us", f.r_lifetime_us);
  f.r_branching = r.triple("r_branching", f.r_branching);
  f.gamma_p2_mhz = r.quantity("gamma_p2", "mhz", f.gamma_p2_mhz);
  f.p2_branching = r.triple("p2_branching", f.p2_branching);
  f.recycle_mhz = r.quantity("recycle", "mhz", f.recycle_mhz);
  f.gamma_ge_khz = r.quantity("gamma_ge", "khz", f.gamma_ge_khz);
  f.gamma_p_khz = r.quantity("gamma_p", "khz", f.gamma_p_khz);
  r.finish();
  return f;
}

Json full_json(const FullConfig& f) {
  return {{"omega_a1_mhz", f.omega_a1_mhz},
          {"omega_a2_mhz", f.omega_a2_mhz},
          {"delta_mhz", f.delta_mhz},
          {"light_shift_compensation", f.light_shift_compensation},
          {"gamma_p1_mhz", f.gamma_p1_mhz},
          {"r_lifetime_us", f.r_lifetime_us},
          {"r_branching", f.r_branching},
          {"gamma_p2_mhz", f.gamma_p2_mhz},
          {"p2_branching", f.p2_branching},
          {"recycle_mhz", f.recycle_mhz},
          {"gamma_ge_khz", f.gamma_ge_khz},
          {"gamma_p_khz", f.gamma_p_khz}};
}

ProtocolConfig read_protocol(Reader r) {
  ProtocolConfig p;
  p.kind = lower(r.string("kind", p.kind));
  if (p.kind != "bell" && p.kind != "qutrit" && p.kind != "ghz" && p.kind != "explicit") {
    r.fail(r.field("kind"), "'" + p.kind + "' is not one of bell, qutrit, ghz, explicit");
  }
  p.name = r.string("name", "");
  p.n_atoms = r.count("n_atoms", p.kind == "ghz" ? 3 : 2);
  p.cycles = r.count("cycles", p.cycles);
  p.omega_a_mhz = r.quantity("omega_a", "mhz", p.omega_a_mhz);
  p.omega_b_mhz = r.quantity("omega_b", "mhz", p.omega_b_mhz);
  p.gamma_mhz = r.quantity("gamma", "mhz", p.gamma_mhz);
  p.u_mhz = r.quantity("u", "mhz", p.u_mhz);
  p.relax_us = r.quantity("relax", "us", p.relax_us);
  p.omega_c_khz = r.quantity("omega_c", "khz", p.omega_c_khz);
  p.microwave_placement = r.choice("microwave_placement", p.microwave_placement, {"AFTER_LAST_RELAX", "AFTER_EACH_RELAX"});
  p.timing = r.choice("timing", p.timing, {"SOLVER", "RESONANT", "PRINTED"});
  p.max_k = r.integer("max_k", p.max_k);
  p.scheme = r.choice("scheme", p.scheme, {"REDUCED_GER", "REDUCED_GEHR", "FULL_SIX"});
  if (const Json* segs = r.take("segments")) {
    if (!segs->is_array()) r.fail(r.field("segments"), "expected a list of segments");
    for (std::size_t k = 0; k < segs->size(); ++k) {
      Reader sr((*segs)[k], r.field("segments") + "[" + std::to_string(k) + "]", r.text());
      p.segments.push_back(read_segment(sr));
    }
  }
  if (p.kind == "explicit" && p.segments.empty()) r.fail(r.field("segments"), "an explicit protocol needs segments");
  if (p.kind != "explicit" && !p.segments.empty()) r.fail(r.field("segments"), "segments are only allowed with kind explicit");
  p.envelope = r.choice("envelope", p.envelope, {"SQUARE", "GAUSSIAN"});
  p.sigma_us = r.quantity_map("sigma", "us");
  p.timing_error = r.number("timing_error", p.timing_error);
  p.timing_error_steps = r.strings("timing_error_steps");
  p.model = r.choice("model", p.model, {"EFFECTIVE", "FULL"});
  p.full = read_full(r.child("full"));
  r.finish();
  return p;
}

Json protocol_json(const ProtocolConfig& p) {
  Json segs = Json::array();
  for (const auto& s : p.segments) segs.push_back(segment_json(s));
  Json sigma = Json::object();
  for (const auto& [k, v] : p.sigma_us) sigma[k] = v;
  return {{"kind", p.kind},
          {"name", p.name},
          {"n_atoms", p.n_atoms},
          {"cycles", p.cycles},
          {"omega_a_mhz", p.omega_a_mhz},
          {"omega_b_mhz", p.omega_b_mhz},
          {"gamma_mhz", p.gamma_mhz},
          {"u_mhz", p.u_mhz},
          {"relax_us", p.relax_us},
          {"omega_c_khz", p.omega_c_khz},
          {"microwave_placement", p.microwave_placement},
          {"timing", p.timing},
          {"max_k", p.max_k},
          {"scheme", p.scheme},
          {"segments", segs},
          {"envelope", p.envelope},
          {"sigma_us", sigma},
          {"timing_error", p.timing_error},
          {"timing_error_steps", p.timing_error_steps},
          {"model", p.model},
          {"full", full_json(p.full)}};
}

ThermalConfig read_thermal(Reader r) {
  ThermalConfig t;
  t.temperatures_uk = r.quantity_list("temperatures", "uk", t.temperatures_uk);
  t.trajectories = r.count("trajectories", t.trajectories);
  t.waist_um = r.quantity("waist", "um", t.waist_um);
  t.wavelength_nm = r.quantity("wavelength", "nm", t.wavelength_nm);
  t.power_uw = r.quantity("power", "uw", t.power_uw);
  t.transition_nm = r.quantity("transition", "nm", t.transition_nm);
  t.linewidth_mhz = r.quantity("linewidth", "mhz", t.linewidth_mhz);
  t.depth_model = r.choice("depth_model", t.depth_model, {"OVERRIDE", "PRINTED"});
  t.depth_mk = r.quantity("depth", "mk", t.depth_mk);
  t.z_spacing_um = r.quantity("z_spacing", "um", t.z_spacing_um);
  t.k_eff_rad_per_um = r.quantity("k_eff", "rad_per_um", t.k_eff_rad_per_um);
  t.k_eff_by_step_rad_per_um = r.quantity_map("k_eff_by_step", "rad_per_um");
  t.integrator = r.choice("integrator", t.integrator, {"RK4_FIXED", "RK45_ADAPTIVE", "MAGNUS_MIDPOINT"});
  t.slice_us = r.quantity("slice", "us", t.slice_us);
  r.finish();
  return t;
}

Json thermal_json(const ThermalConfig& t) {
  Json k = Json::object();
  for (const auto& [step, v] : t.k_eff_by_step_rad_per_um) k[step] = v;
  return {{"temperatures_uk", t.temperatures_uk},
          {"trajectories", t.trajectories},
          {"waist_um", t.waist_um},
          {"wavelength_nm", t.wavelength_nm},
          {"power_uw", t.power_uw},
          {"transition_nm", t.transition_nm},
          {"linewidth_mhz", t.linewidth_mhz},
          {"depth_model", t.depth_model},
          {"depth_mk", t.depth_mk},
          {"z_spacing_um", t.z_spacing_um},
          {"k_eff_rad_per_um", t.k_eff_rad_per_um},
          {"k_eff_by_step_rad_per_um", k},
          {"integrator", t.integrator},
          {"slice_us", t.slice_us}};
}

}  // namespace

RunConfig from_json(const Json& j, const std::string& text) {
  Reader r(j, "", text);
  RunConfig c;
  if (!r.has("protocol")) r.fail("protocol", "missing protocol block");
  c.protocol = read_protocol(r.child("protocol"));
  {
    Reader s = r.child("initial_state");
    c.initial_state.kind = s.choice("kind", c.initial_state.kind, {"FULLY_MIXED_GE", "FULLY_MIXED_GEH", "MIX_LIST"});
    if (const Json* mix = s.take("mix")) {
      if (!mix->is_array()) s.fail(s.field("mix"), "expected a list");
      for (std::size_t k = 0; k < mix->size(); ++k) {
        Reader m((*mix)[k], s.field("mix") + "[" + std::to_string(k) + "]", text);
        MixConfig e;
        e.weight = m.number("weight", 0.0);
        e.state = m.string("state", "");
        m.finish();
        c.initial_state.mix.push_back(e);
      }
    }
    if (c.initial_state.kind == "MIX_LIST" && c.initial_state.mix.empty()) {
      s.fail(s.field("mix"), "MIX_LIST needs at least one entry");
    }
    s.finish();
  }
  c.observables = r.strings("observables");
  if (r.has("noise") && !j.at("noise").is_null()) {
    Reader n = r.child("noise");
    NoiseConfig noise;
    if (n.has("thermal") && !j.at("noise").at("thermal").is_null()) {
      noise.thermal = read_thermal(n.child("thermal"));
    } else {
      n.take("thermal");
    }
    n.finish();
    c.noise = noise;
  } else {
    r.take("noise");
  }
  {
    Reader s = r.child("integrator");
    c.integrator.method = s.choice("method", c.integrator.method, {"RK4_FIXED", "RK45_ADAPTIVE", "MAGNUS_MIDPOINT"});
    c.integrator.rel_tol = s.number("rel_tol", c.integrator.rel_tol);
    c.integrator.abs_tol = s.number("abs_tol", c.integrator.abs_tol);
    c.integrator.max_step_us = s.quantity("max_step", "us", c.integrator.max_step_us);
    c.integrator.slice_us = s.quantity("slice", "us", c.integrator.slice_us);
    c.integrator.exact_propagators = s.boolean("exact_propagators", c.integrator.exact_propagators);
    c.integrator.max_superoperator_dim = s.count("max_superoperator_dim", c.integrator.max_superoperator_dim);
    s.finish();
  }
  {
    Reader s = r.child("output");
    c.output.prefix = s.string("prefix", "");
    c.output.record = s.choice("record", c.output.record, {"CYCLE", "SEGMENT"});
    s.finish();
  }
  if (const Json* sweep = r.take("sweep")) {
    const Json axes = sweep->is_array() ? *sweep : Json::array({*sweep});
    for (std::size_t k = 0; k < axes.size(); ++k) {
      Reader a(axes[k], std::string("sweep") + (sweep->is_array() ? "[" + std::to_string(k) + "]" : ""), text);
      SweepAxis axis;
      axis.param = a.string("param", "");
      if (axis.param.empty()) a.fail(a.field("param"), "missing parameter name");
      const Json* values = a.take("values");
      if (!values || !values->is_array() || values->empty()) a.fail(a.field("values"), "expected a non-empty list");
      axis.values.assign(values->begin(), values->end());
      a.finish();
      c.sweep.push_back(axis);
    }
  }
  if (const Json* seed = r.take("seed")) {
    if (!seed->is_number_unsigned()) r.fail("seed", "expected a non-negative integer");
    c.seed = seed->get<std::uint64_t>();
  }
  r.finish();
  return c;
}

Json to_json(const RunConfig& c) {
  Json mix = Json::array();
  for (const auto& e : c.initial_state.mix) mix.push_back({{"weight", e.weight}, {"state", e.state}});
  Json j{{"protocol", protocol_json(c.protocol)},
         {"initial_state", {{"kind", c.initial_state.kind}, {"mix", mix}}},
         {"observables", c.observables},
         {"integrator",
          {{"method", c.integrator.method},
           {"rel_tol", c.integrator.rel_tol},
           {"abs_tol", c.integrator.abs_tol},
           {"max_step_us", c.integrator.max_step_us},
           {"slice_us", c.integrator.slice_us},
           {"exact_propagators", c.integrator.exact_propagators},
           {"max_superoperator_dim", c.integrator.max_superoperator_dim}}},
         {"output", {{"prefix", c.output.prefix}, {"record", c.output.record}}},
         {"seed", c.seed}};
  if (c.noise) {
    j["noise"] = {{"thermal", c.noise->thermal ? thermal_json(*c.noise->thermal) : Json(nullptr)}};
  } else {
    j["noise"] = nullptr;
  }
  Json sweep = Json::array();
  for (const auto& a : c.sweep) sweep.push_back({{"param", a.param}, {"values", a.values}});
  j["sweep"] = sweep;
  return j;
}

RunConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line = static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n')) + 1;
    throw ConfigError("config is not valid JSON (line " + std::to_string(line) + "): " + e.what());
  }
  return from_json(j, text);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_hash(const RunConfig& c) {
  const std::string dump = to_json(c).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

RunConfig with_value(const RunConfig& c, const std::string& param, const Json& value) {
  Json j = to_json(c);
  auto try_path = [&](const std::string& dotted) -> bool {
    Json* node = &j;
    std::size_t start = 0;
    while (true) {
      const std::size_t end = dotted.find('.', start);
      const std::string key = dotted.substr(start, end == std::string::npos ? std::string::npos : end - start);
      if (!node->is_object() || !node->contains(key)) return false;
      node = &(*node)[key];
      if (end == std::string::npos) break;
      start = end + 1;
    }
    if (node->is_object() || node->is_array()) return false;
    *node = value;
    return true;
  };
  if (!try_path(param) && !try_path("protocol." + param)) {
    throw ConfigError("unknown sweep parameter '" + param + "'");
  }
  return from_json(j);
}

Protocol build_protocol(const ProtocolConfig& c) {
  using namespace units;
  Protocol p;
  const double omega_a = mhz(c.omega_a_mhz);
  const double omega_b = mhz(c.omega_b_mhz);
  const double gamma = mhz(c.gamma_mhz);
  const double u = mhz(c.u_mhz);
  const double relax = us(c.relax_us);
  if (c.kind == "bell" || c.kind == "qutrit") {
    if (c.n_atoms != 2) throw ConfigError("protocol.n_atoms: " + c.kind + " needs 2 atoms");
  }
  if (c.kind == "bell") {
    p = bell_protocol(omega_a, omega_b, gamma, u, relax, c.cycles);
  } else if (c.kind == "qutrit") {
    const auto placement = c.microwave_placement == "AFTER_EACH_RELAX" ? MicrowavePlacement::AfterEachRelax
                                                                       : MicrowavePlacement::AfterLastRelax;
    p = qutrit_protocol(omega_a, omega_b, gamma, u, khz(c.omega_c_khz), relax, c.cycles, placement);
  } else if (c.kind == "ghz") {
    std::optional<TimingSolution> timing;
    if (c.timing == "SOLVER") {
      timing = solve_stepC_timing(omega_a, c.max_k);
    } else if (c.timing == "PRINTED") {
      TimingSolution t;
      t.delta = omega_a / std::sqrt(6.0);
      t.t = std::sqrt(6.0) * kPi / omega_a;
      timing = t;
    }
    p = ghz_protocol(c.n_atoms, omega_a, omega_b, gamma, u, relax, c.cycles, timing);
  } else {
    p.name = "explicit";
    p.n_atoms = c.n_atoms;
    p.scheme = parse_scheme(c.scheme);
    p.cycles = c.cycles;
    p.omega_b = omega_b;
    p.gamma = gamma;
    for (const auto& s : c.segments) {
      if (s.kind == "PULSE") {
        DriveSpec d;
        d.source = parse_drive_source(s.source);
        d.rabi_amplitude = mhz(s.rabi_mhz);
        d.detuning = mhz(s.detuning_mhz);
        d.envelope = s.envelope == "GAUSSIAN" ? Envelope::gaussian(us(s.sigma_us)) : Envelope::square();
        d.per_atom_phase = s.phases;
        d.frame = s.frame == "OSCILLATING" ? DriveFrame::Oscillating : DriveFrame::Static;
        InteractionSpec inter;
        for (const auto& pc : s.interaction) inter.pairs.push_back({pc.i, pc.j, mhz(pc.u_mhz)});
        Segment seg = Segment::pulse(s.label, d, inter, us(s.duration_us));
        seg.square_duration = us(s.square_duration_us);
        p.segments.push_back(seg);
      } else if (s.kind == "RELAX") {
        p.segments.push_back(Segment::relax(s.label, us(s.duration_us), s.include_h));
      } else {
        p.segments.push_back(Segment::microwave(s.label, khz(s.omega_c_khz), us(s.duration_us)));
      }
    }
  }
  if (!c.name.empty()) p.name = c.name;
  if (c.envelope == "GAUSSIAN") {
    std::map<std::string, double> sigma;
    for (const auto& [k, v] : c.sigma_us) sigma[k] = us(v);
    p = gaussianize(p, sigma);
  }
  if (c.timing_error != 0.0) {
    p = perturb_timing(p, c.timing_error, {c.timing_error_steps.begin(), c.timing_error_steps.end()});
  }
  if (c.model == "FULL") {
    FullModelParams f;
    f.omega_a1 = mhz(c.full.omega_a1_mhz);
    f.omega_a2 = mhz(c.full.omega_a2_mhz);
    f.delta = mhz(c.full.delta_mhz);
    f.light_shift_compensation = c.full.light_shift_compensation;
    f.gamma_p1 = mhz(c.full.gamma_p1_mhz);
    if (!(c.full.r_lifetime_us > 0.0)) throw ConfigError("protocol.full.r_lifetime_us must be positive");
    f.gamma_r = 1.0 / us(c.full.r_lifetime_us);
    f.natural.r_branching = c.full.r_branching;
    f.natural.gamma_p2 = mhz(c.full.gamma_p2_mhz);
    f.natural.p2_branching = c.full.p2_branching;
    f.recycle_rate = mhz(c.full.recycle_mhz);
    f.gamma_ge = khz(c.full.gamma_ge_khz);
    f.gamma_p = khz(c.full.gamma_p_khz);
    p = to_full_model(p, f);
  }
  p.validate();
  return p;
}

Study build_study(const RunConfig& c) {
  Protocol p = build_protocol(c.protocol);
  const Basis basis = p.basis();
  InitialStateSpec init;
  if (c.initial_state.kind == "FULLY_MIXED_GE") {
    init.kind = InitialKind::FullyMixedGE;
  } else if (c.initial_state.kind == "FULLY_MIXED_GEH") {
    init.kind = InitialKind::FullyMixedGEH;
  } else {
    init.kind = InitialKind::MixList;
    for (const auto& e : c.initial_state.mix) init.mix.push_back({e.weight, parse_pattern(e.state, basis.n_atoms())});
  }
  DensityMatrix rho0 = initial_state(init, basis);
  std::vector<TargetState> obs;
  if (c.observables.empty()) {
    obs = default_observables(p);
  } else {
    for (const auto& label : c.observables) obs.push_back(target_by_label(label, basis));
  }
  IntegratorConfig cfg;
  cfg.method = parse_integrator(c.integrator.method);
  cfg.rel_tol = c.integrator.rel_tol;
  cfg.abs_tol = c.integrator.abs_tol;
  cfg.max_step = units::us(c.integrator.max_step_us);
  cfg.slice = units::us(c.integrator.slice_us);
  cfg.exact_propagators = c.integrator.exact_propagators;
  cfg.max_superoperator_dim = c.integrator.max_superoperator_dim;
  cfg.validate();
  return {std::move(p), std::move(rho0), std::move(obs), cfg,
          c.output.record == "SEGMENT" ? RecordMode::Segment : RecordMode::Cycle};
}

TrapParams build_trap(const ThermalConfig& c) {
  TrapParams t;
  t.waist = units::um(c.waist_um);
  t.wavelength = c.wavelength_nm * 1e-9;
  t.power = c.power_uw * 1e-6;
  t.transition_frequency = kTwoPi * kSpeedOfLight / (c.transition_nm * 1e-9);
  t.laser_frequency = kTwoPi * kSpeedOfLight / (c.wavelength_nm * 1e-9);
  t.linewidth = units::mhz(c.linewidth_mhz);
  if (c.depth_model == "OVERRIDE") {
    t.depth_override = c.depth_mk * 1e-3 * kBoltzmann;
  } else {
    t.depth_override.reset();
  }
  return t;
}

MotionSpec build_motion(const ThermalConfig& c) {
  MotionSpec m;
  m.z_spacing = units::um(c.z_spacing_um);
  m.k_eff = c.k_eff_rad_per_um * 1e6;
  for (const auto& [k, v] : c.k_eff_by_step_rad_per_um) m.k_eff_by_label[k] = v * 1e6;
  return m;
}

Json protocol_to_json(const Protocol& p) {
  using units::to_mhz;
  using units::to_us;
  Json segs = Json::array();
  for (const auto& s : p.segments) {
    Json j{{"kind", segment_kind_name(s.kind)}, {"label", s.label}, {"duration_us", to_us(s.duration)}};
    if (s.kind == SegmentKind::Pulse) {
      j["source"] = drive_source_name(s.drive.source);
      j["rabi_mhz"] = to_mhz(s.drive.rabi_amplitude);
      j["detuning_mhz"] = to_mhz(s.drive.detuning);
      j["envelope"] = s.drive.envelope.kind == EnvelopeKind::Gaussian ? "GAUSSIAN" : "SQUARE";
      j["sigma_us"] = to_us(s.drive.envelope.sigma);
      j["phases"] = s.drive.per_atom_phase;
      j["frame"] = s.drive.frame == DriveFrame::Oscillating ? "OSCILLATING" : "STATIC";
      j["square_duration_us"] = to_us(s.square_duration);
      Json pairs = Json::array();
      for (const auto& pr : s.interaction.pairs) pairs.push_back({{"i", pr.i}, {"j", pr.j}, {"u_mhz", to_mhz(pr.strength)}});
      j["interaction"] = pairs;
    } else if (s.kind == SegmentKind::Relax) {
      j["include_h"] = s.include_h;
    } else {
      j["omega_c_khz"] = to_mhz(s.omega_c) * 1e3;
    }
    segs.push_back(j);
  }
  Json out{{"name", p.name},
           {"n_atoms", p.n_atoms},
           {"scheme", scheme_name(p.scheme)},
           {"cycles", p.cycles},
           {"omega_b_mhz", to_mhz(p.omega_b)},
           {"gamma_mhz", to_mhz(p.gamma)},
           {"tier", p.tier == ModelTier::Full ? "FULL" : "EFFECTIVE"},
           {"cycle_duration_us", to_us(p.cycle_duration())},
           {"segments", segs}};
  return out;
}

}  // namespace rydprep::cli
