#include "rodfsi/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace rodfsi::io {

namespace {

using mesh::BoundaryTag;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ConfigError(where + ": " + what); }

double parse_number(const std::string& raw, const std::string& where) {
  std::string s = trim(raw);
  double factor = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    factor = std::numbers::pi;
    s.resize(s.size() - 2);
    if (!s.empty() && s.back() == '*') s.pop_back();
    if (s.empty() || s == "+") return factor;
    if (s == "-") return -factor;
  }
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last || !std::isfinite(v)) fail(where, "expected a number, got '" + raw + "'");
  return v * factor;
}

int parse_int(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    fail(where, "expected an integer, got '" + raw + "'");
  return v;
}

bool parse_bool(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  if (s == "true") return true;
  if (s == "false") return false;
  fail(where, "expected true or false, got '" + raw + "'");
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

std::string side_string(const std::vector<mesh::SidePiece>& pieces) {
  std::string out;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    if (k) out += ' ';
    out += mesh::tag_name(pieces[k].tag);
    if (k + 1 < pieces.size()) out += ':' + format_double(pieces[k].upto);
  }
  return out;
}

std::vector<mesh::SidePiece> parse_side(const std::string& raw, double length, const std::string& where) {
  std::vector<mesh::SidePiece> pieces;
  const auto words = split_ws(raw);
  if (words.empty()) fail(where, "side needs at least one boundary tag");
  double prev = 0.0;
  for (std::size_t k = 0; k < words.size(); ++k) {
    const auto colon = words[k].find(':');
    mesh::SidePiece p;
    try {
      p.tag = mesh::tag_from_name(words[k].substr(0, colon));
    } catch (const Error&) {
      fail(where, "unknown boundary tag '" + words[k].substr(0, colon) + "'");
    }
    const bool last = k + 1 == words.size();
    if (colon == std::string::npos) {
      if (!last) fail(where, "every piece but the last needs tag:upto");
      p.upto = length;
    } else {
      p.upto = parse_number(words[k].substr(colon + 1), where);
      if (!(p.upto > prev) || p.upto > length) fail(where, "piece ends must increase within the side length");
      if (last && p.upto != length) fail(where, "the last piece must reach the end of the side");
    }
    prev = p.upto;
    pieces.push_back(p);
  }
  return pieces;
}

void stretch_side(std::vector<mesh::SidePiece>& pieces, double length) {
  if (!pieces.empty()) pieces.back().upto = length;
}

template <class T>
T* shape_as(ScenarioSpec& s) {
  return std::get_if<T>(&s.geometry.shape);
}

double& thickness_ref(ScenarioSpec& s) {
  return std::visit([](auto& sh) -> double& { return sh.e; }, s.geometry.shape);
}

struct Field {
  std::string section, key;
  std::function<bool(const ScenarioSpec&)> applies;
  std::function<void(ScenarioSpec&, const std::string&, const std::string&)> set;
  std::function<std::string(const ScenarioSpec&)> get;
};

auto always = [](const ScenarioSpec&) { return true; };

template <class A>
bool actuation_is(const ScenarioSpec& s) {
  return std::holds_alternative<A>(s.law.actuation);
}
template <class R>
bool rheology_is(const ScenarioSpec& s) {
  return !s.friction && std::holds_alternative<R>(s.rheology);
}

// Numeric field bound to a member reached through `ref`.
template <class Ref>
Field num(std::string sec, std::string key, std::function<bool(const ScenarioSpec&)> applies, Ref ref) {
  return {std::move(sec), std::move(key), std::move(applies),
          [ref](ScenarioSpec& s, const std::string& v, const std::string& w) { ref(s) = parse_number(v, w); },
          [ref](const ScenarioSpec& s) { return format_double(ref(const_cast<ScenarioSpec&>(s))); }};
}

template <class Ref>
Field integer(std::string sec, std::string key, Ref ref) {
  return {std::move(sec), std::move(key), always,
          [ref](ScenarioSpec& s, const std::string& v, const std::string& w) { ref(s) = parse_int(v, w); },
          [ref](const ScenarioSpec& s) { return std::to_string(ref(const_cast<ScenarioSpec&>(s))); }};
}

template <class Ref>
Field boolean(std::string sec, std::string key, Ref ref) {
  return {std::move(sec), std::move(key), always,
          [ref](ScenarioSpec& s, const std::string& v, const std::string& w) { ref(s) = parse_bool(v, w); },
          [ref](const ScenarioSpec& s) { return fmt_bool(ref(const_cast<ScenarioSpec&>(s))); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"scenario", "name", always,
                 [](ScenarioSpec& s, const std::string& v, const std::string&) { s.name = trim(v); },
                 [](const ScenarioSpec& s) { return s.name; }});

    f.push_back(num("domain", "Lx", always, [](ScenarioSpec& s) -> double& { return s.domain.Lx; }));
    f.push_back(num("domain", "Ly", always, [](ScenarioSpec& s) -> double& { return s.domain.Ly; }));
    const char* side_keys[4] = {"bottom", "right", "top", "left"};
    for (int side = 0; side < 4; ++side)
      f.push_back({"domain", side_keys[side], always,
                   [side](ScenarioSpec& s, const std::string& v, const std::string& w) {
                     const double len = side % 2 == 0 ? s.domain.Lx : s.domain.Ly;
                     s.domain.sides[side] = parse_side(v, len, w);
                   },
                   [side](const ScenarioSpec& s) { return side_string(s.domain.sides[side]); }});

    f.push_back({"body", "shape", always,
                 [](ScenarioSpec& s, const std::string& v, const std::string& w) {
                   const std::string t = trim(v);
                   const double e = s.geometry.thickness();
                   auto& sh = s.geometry.shape;
                   if (t == "flat") {
                     if (!std::holds_alternative<kin::FlatBoth>(sh)) sh = kin::FlatBoth{e};
                   } else if (t == "swimmer") {
                     if (!std::holds_alternative<kin::RoundedLeftWithHead>(sh)) sh = kin::RoundedLeftWithHead{e};
                   } else if (t == "clamped") {
                     if (!std::holds_alternative<kin::ClampedRoundedRight>(sh)) sh = kin::ClampedRoundedRight{e};
                   }
                   else fail(w, "unknown shape '" + t + "' (expected flat, swimmer or clamped)");
                 },
                 [](const ScenarioSpec& s) -> std::string {
                   if (std::holds_alternative<kin::FlatBoth>(s.geometry.shape)) return "flat";
                   if (std::holds_alternative<kin::RoundedLeftWithHead>(s.geometry.shape)) return "swimmer";
                   return "clamped";
                 }});
    f.push_back(num("body", "e", always, [](ScenarioSpec& s) -> double& { return thickness_ref(s); }));
    auto swimmer = [](const ScenarioSpec& s) { return std::holds_alternative<kin::RoundedLeftWithHead>(s.geometry.shape); };
    f.push_back(num("body", "beta_d", swimmer,
                    [](ScenarioSpec& s) -> double& { return shape_as<kin::RoundedLeftWithHead>(s)->beta_d; }));
    f.push_back(num("body", "beta_h", swimmer,
                    [](ScenarioSpec& s) -> double& { return shape_as<kin::RoundedLeftWithHead>(s)->beta_h; }));
    f.push_back(num("body", "L_r", always, [](ScenarioSpec& s) -> double& { return s.geometry.L_r; }));
    f.push_back(num("body", "S", always, [](ScenarioSpec& s) -> double& { return s.geometry.S; }));
    f.push_back(num("body", "left_x", always, [](ScenarioSpec& s) -> double& { return s.geometry.left.x(); }));
    f.push_back(num("body", "left_y", always, [](ScenarioSpec& s) -> double& { return s.geometry.left.y(); }));

    f.push_back(integer("rod", "n_el", [](ScenarioSpec& s) -> int& { return s.n_el; }));
    f.push_back({"rod", "mode", always,
                 [](ScenarioSpec& s, const std::string& v, const std::string& w) {
                   const std::string t = trim(v);
                   if (t == "inverse_norm") s.mode = kin::KinematicMode::AEqualsInverseNorm;
                   else if (t == "one") s.mode = kin::KinematicMode::AEqualsOne;
                   else fail(w, "unknown mode '" + t + "' (expected inverse_norm or one)");
                 },
                 [](const ScenarioSpec& s) -> std::string {
                   return s.mode == kin::KinematicMode::AEqualsOne ? "one" : "inverse_norm";
                 }});
    f.push_back(num("rod", "C_eps", always, [](ScenarioSpec& s) -> double& { return s.law.C_eps; }));
    f.push_back(num("rod", "C_kappa", always, [](ScenarioSpec& s) -> double& { return s.law.C_kappa; }));
    f.push_back({"rod", "locked", always,
                 [](ScenarioSpec& s, const std::string& v, const std::string& w) {
                   s.locked_dofs.clear();
                   for (const auto& word : split_ws(v)) s.locked_dofs.push_back(parse_int(word, w));
                 },
                 [](const ScenarioSpec& s) {
                   std::string out;
                   for (std::size_t k = 0; k < s.locked_dofs.size(); ++k)
                     out += (k ? " " : "") + std::to_string(s.locked_dofs[k]);
                   return out;
                 }});

    f.push_back({"actuation", "type", always,
                 [](ScenarioSpec& s, const std::string& v, const std::string& w) {
                   const std::string t = trim(v);
                   static const char* names[] = {"constant", "step", "tanh", "wave"};
                   if (t == names[s.law.actuation.index()]) return;
                   if (t == "constant") s.law.actuation = rod::ConstantActuation{};
                   else if (t == "step") s.law.actuation = rod::StepActuation{};
                   else if (t == "tanh") s.law.actuation = rod::TanhRampActuation{};
                   else if (t == "wave") s.law.actuation = rod::TravelingWaveActuation{};
                   else fail(w, "unknown actuation '" + t + "' (expected constant, step, tanh or wave)");
                 },
                 [](const ScenarioSpec& s) -> std::string {
                   static const char* names[] = {"constant", "step", "tanh", "wave"};
                   return names[s.law.actuation.index()];
                 }});
    using CA = rod::ConstantActuation;
    using SA = rod::StepActuation;
    using TA = rod::TanhRampActuation;
    using WA = rod::TravelingWaveActuation;
    f.push_back(num("actuation", "eps0", actuation_is<CA>, [](ScenarioSpec& s) -> double& { return std::get<CA>(s.law.actuation).eps0; }));
    f.push_back(num("actuation", "kappa0", actuation_is<CA>, [](ScenarioSpec& s) -> double& { return std::get<CA>(s.law.actuation).kappa0; }));
    f.push_back(num("actuation", "kappa_before", actuation_is<SA>, [](ScenarioSpec& s) -> double& { return std::get<SA>(s.law.actuation).kappa_before; }));
    f.push_back(num("actuation", "kappa_after", actuation_is<SA>, [](ScenarioSpec& s) -> double& { return std::get<SA>(s.law.actuation).kappa_after; }));
    f.push_back(num("actuation", "t_switch", actuation_is<SA>, [](ScenarioSpec& s) -> double& { return std::get<SA>(s.law.actuation).t_switch; }));
    auto tanh_or_wave = [](const ScenarioSpec& s) { return actuation_is<TA>(s) || actuation_is<WA>(s); };
    f.push_back(num("actuation", "amplitude", tanh_or_wave, [](ScenarioSpec& s) -> double& {
      if (auto* t = std::get_if<TA>(&s.law.actuation)) return t->amplitude;
      return std::get<WA>(s.law.actuation).amplitude;
    }));
    f.push_back(num("actuation", "rate", actuation_is<TA>, [](ScenarioSpec& s) -> double& { return std::get<TA>(s.law.actuation).rate; }));
    f.push_back(num("actuation", "wavenumber", actuation_is<WA>, [](ScenarioSpec& s) -> double& { return std::get<WA>(s.law.actuation).wavenumber; }));
    f.push_back(num("actuation", "speed", actuation_is<WA>, [](ScenarioSpec& s) -> double& { return std::get<WA>(s.law.actuation).speed; }));

    using NW = fluid::Newtonian;
    using CY = fluid::CarreauYasuda;
    f.push_back({"fluid", "model", always,
                 [](ScenarioSpec& s, const std::string& v, const std::string& w) {
                   const std::string t = trim(v);
                   if (t == "friction") {
                     if (!s.friction) s.friction = fsi::FrictionModel{};
                     return;
                   }
                   s.friction.reset();
                   if (t == "newtonian") {
                     if (!std::holds_alternative<NW>(s.rheology)) s.rheology = NW{1.0};
                   } else if (t == "carreau_yasuda") {
                     if (!std::holds_alternative<CY>(s.rheology)) s.rheology = CY{};
                   }
                   else fail(w, "unknown fluid model '" + t + "' (expected newtonian, carreau_yasuda or friction)");
                 },
                 [](const ScenarioSpec& s) -> std::string {
                   if (s.friction) return "friction";
                   return std::holds_alternative<NW>(s.rheology) ? "newtonian" : "carreau_yasuda";
                 }});
    f.push_back(num("fluid", "mu", rheology_is<NW>, [](ScenarioSpec& s) -> double& { return std::get<NW>(s.rheology).mu; }));
    f.push_back(num("fluid", "eta0", rheology_is<CY>, [](ScenarioSpec& s) -> double& { return std::get<CY>(s.rheology).eta0; }));
    f.push_back(num("fluid", "eta_inf", rheology_is<CY>, [](ScenarioSpec& s) -> double& { return std::get<CY>(s.rheology).eta_inf; }));
    f.push_back(num("fluid", "lambda", rheology_is<CY>, [](ScenarioSpec& s) -> double& { return std::get<CY>(s.rheology).lambda; }));
    f.push_back(num("fluid", "r", rheology_is<CY>, [](ScenarioSpec& s) -> double& { return std::get<CY>(s.rheology).r; }));
    f.push_back(num("fluid", "beta", [](const ScenarioSpec& s) { return s.friction.has_value(); },
                    [](ScenarioSpec& s) -> double& { return s.friction->beta; }));

    f.push_back(boolean("inlet", "enabled", [](ScenarioSpec& s) -> bool& { return s.inlet.enabled; }));
    f.push_back(num("inlet", "t_open", always, [](ScenarioSpec& s) -> double& { return s.inlet.t_open; }));
    f.push_back(num("inlet", "scale", always, [](ScenarioSpec& s) -> double& { return s.inlet.scale; }));

    f.push_back(num("mesh", "h_wet", always, [](ScenarioSpec& s) -> double& { return s.sizing.h_wet; }));
    f.push_back(num("mesh", "growth", always, [](ScenarioSpec& s) -> double& { return s.sizing.growth; }));
    f.push_back(num("mesh", "h_max", always, [](ScenarioSpec& s) -> double& { return s.sizing.h_max; }));
    f.push_back(num("mesh", "min_angle", always, [](ScenarioSpec& s) -> double& { return s.sizing.min_angle; }));
    f.push_back(num("mesh", "min_angle_wet", always, [](ScenarioSpec& s) -> double& { return s.sizing.min_angle_wet; }));
    f.push_back(num("mesh", "refine_angle", always, [](ScenarioSpec& s) -> double& { return s.sizing.refine_angle; }));
    f.push_back(num("mesh", "wall_clearance", always, [](ScenarioSpec& s) -> double& { return s.sizing.wall_clearance; }));
    f.push_back(num("mesh", "self_gap", always, [](ScenarioSpec& s) -> double& { return s.sizing.self_gap; }));
    f.push_back(integer("mesh", "max_steiner", [](ScenarioSpec& s) -> int& { return s.sizing.max_steiner; }));

    f.push_back({"scheme", "name", always,
                 [](ScenarioSpec& s, const std::string& v, const std::string& w) {
                   try {
                     s.scheme.scheme = fsi::scheme_from_name(trim(v));
                   } catch (const ConfigError& e) {
                     fail(w, e.what());
                   }
                 },
                 [](const ScenarioSpec& s) -> std::string { return fsi::scheme_name(s.scheme.scheme); }});
    f.push_back(num("scheme", "dt", always, [](ScenarioSpec& s) -> double& { return s.scheme.dt; }));
    f.push_back(boolean("scheme", "adaptive", [](ScenarioSpec& s) -> bool& { return s.scheme.adaptive; }));
    f.push_back(num("scheme", "dt_min", always, [](ScenarioSpec& s) -> double& { return s.scheme.dt_min; }));
    f.push_back(num("scheme", "dt_max", always, [](ScenarioSpec& s) -> double& { return s.scheme.dt_max; }));
    f.push_back(num("scheme", "zeta", always, [](ScenarioSpec& s) -> double& { return s.scheme.zeta; }));
    f.push_back(num("scheme", "f_tol", always, [](ScenarioSpec& s) -> double& { return s.scheme.f_tol; }));
    f.push_back(integer("scheme", "max_outer", [](ScenarioSpec& s) -> int& { return s.scheme.max_outer; }));
    f.push_back(integer("scheme", "krylov_restart", [](ScenarioSpec& s) -> int& { return s.scheme.krylov_restart; }));
    f.push_back(integer("scheme", "max_krylov", [](ScenarioSpec& s) -> int& { return s.scheme.max_krylov; }));
    f.push_back(num("scheme", "fd_step", always, [](ScenarioSpec& s) -> double& { return s.scheme.fd_step; }));
    f.push_back(boolean("scheme", "linear_path", [](ScenarioSpec& s) -> bool& { return s.scheme.linear_path; }));
    f.push_back({"scheme", "preconditioner", always,
                 [](ScenarioSpec& s, const std::string& v, const std::string& w) {
                   const std::string t = trim(v);
                   if (t == "dense") s.scheme.preconditioner = fsi::Preconditioner::Dense;
                   else if (t == "none") s.scheme.preconditioner = fsi::Preconditioner::None;
                   else fail(w, "unknown preconditioner '" + t + "' (expected dense or none)");
                 },
                 [](const ScenarioSpec& s) -> std::string {
                   return s.scheme.preconditioner == fsi::Preconditioner::Dense ? "dense" : "none";
                 }});

    f.push_back(num("output", "t_end", always, [](ScenarioSpec& s) -> double& { return s.output.t_end; }));
    f.push_back(integer("output", "vtk_every", [](ScenarioSpec& s) -> int& { return s.output.vtk_every; }));
    return f;
  }();
  return table;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fsi::Problem ScenarioSpec::problem() const {
  fsi::Problem p;
  p.domain = domain;
  p.sizing = sizing;
  p.geometry = geometry;
  p.mode = mode;
  p.n_el = n_el;
  p.law = law;
  p.rheology = rheology;
  p.friction = friction;
  p.locked_dofs = locked_dofs;
  if (inlet.enabled) {
    const fluid::InletProfile open = fluid::quartic_inlet(geometry.thickness(), inlet.scale);
    const double t_open = inlet.t_open;
    p.inlet = [open, t_open](double t) -> fluid::InletProfile {
      if (t < t_open) return [](const Vec2&) { return Vec2(0.0, 0.0); };
      return open;
    };
  }
  return p;
}

std::vector<std::string> preset_names() {
  return {"rollup", "halfcircle", "cantilever", "swimmer", "swimmer_thinning", "swimmer_thickening"};
}

ScenarioSpec preset(const std::string& name) {
  ScenarioSpec s;
  s.name = name;
  s.domain = mesh::DomainSpec::rectangle(3.0, 3.0, BoundaryTag::Wall, BoundaryTag::Open, BoundaryTag::Wall,
                                         BoundaryTag::Open);
  s.sizing.h_wet = 0.01;
  s.law.C_eps = 90.0;
  s.law.C_kappa = 0.0225;
  s.geometry.left = Vec2(1.0, 1.5);
  if (name == "rollup" || name == "halfcircle") {
    s.geometry.shape = kin::FlatBoth{0.03};
    s.n_el = 4;
    s.scheme.scheme = fsi::Scheme::SemiImplicit;
    s.scheme.adaptive = true;
    s.scheme.dt = 0.01;
    s.scheme.dt_max = 1.0;
    if (name == "rollup") {
      s.law.actuation = rod::StepActuation{-0.999 * 2.0 * std::numbers::pi, 0.0, 100.0};
      s.output.t_end = 120.0;
    } else {
      s.law.actuation = rod::ConstantActuation{0.0, -std::numbers::pi};
      s.output.t_end = 40.0;
    }
    s.output.vtk_every = 20;
    return s;
  }
  if (name == "cantilever") {
    s.geometry.shape = kin::ClampedRoundedRight{0.03};
    s.geometry.left = Vec2(0.0, 1.5);
    s.domain.sides[mesh::Bottom] = {{3.0, BoundaryTag::Wall}};
    s.domain.sides[mesh::Right] = {{3.0, BoundaryTag::Wall}};
    s.domain.sides[mesh::Top] = {{3.0, BoundaryTag::Outlet}};
    s.domain.sides[mesh::Left] = {{(3.0 - 0.03) / 2.0, BoundaryTag::Inlet}, {3.0, BoundaryTag::Wall}};
    s.mode = kin::KinematicMode::AEqualsOne;
    s.n_el = 8;
    s.law.actuation = rod::TanhRampActuation{2.0 * std::numbers::pi, 4.0};
    s.inlet = InletSpec{true, 12.0, 1.0};
    s.locked_dofs = {rod::RodConfig::dof_index(0, rod::DofKind::Position, 0),
                     rod::RodConfig::dof_index(0, rod::DofKind::Position, 1),
                     rod::RodConfig::dof_index(0, rod::DofKind::Tangent, 1)};
    s.scheme.dt = 0.05;
    s.output.t_end = 30.0;
    s.output.vtk_every = 10;
    return s;
  }
  if (name == "swimmer" || name == "swimmer_thinning" || name == "swimmer_thickening") {
    s.geometry.shape = kin::RoundedLeftWithHead{0.03, 3.0, 3.0};
    s.n_el = 8;
    s.law.actuation = rod::TravelingWaveActuation{20.0, 4.0 * std::numbers::pi, 2.0};
    s.scheme.dt = 0.01;
    s.output.t_end = 4.0;
    s.output.vtk_every = 10;
    if (name == "swimmer_thinning") s.rheology = fluid::CarreauYasuda{1.5, 1e-3, 1.0, 0.7};
    if (name == "swimmer_thickening") s.rheology = fluid::CarreauYasuda{1.5, 1e-3, 1.0, 1.15};
    return s;
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown scenario '" + name + "' (known: " + known + ", custom)");
}

ScenarioSpec parse_config(const std::string& text, const std::string& source) {
  std::map<std::pair<std::string, std::string>, Entry> entries;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') fail(where, "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      const bool known = std::any_of(fields().begin(), fields().end(), [&](const Field& f) { return f.section == section; });
      if (!known) fail(where, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(where, "expected key = value");
    if (section.empty()) fail(where, "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const bool known = std::any_of(fields().begin(), fields().end(),
                                   [&](const Field& f) { return f.section == section && f.key == key; });
    if (!known) fail(where, "unknown key '" + key + "' in section [" + section + "]");
    if (!entries.emplace(std::make_pair(section, key), Entry{trim(line.substr(eq + 1)), lineno}).second)
      fail(where, "duplicate key '" + key + "' in section [" + section + "]");
  }

  ScenarioSpec spec;
  const auto name_it = entries.find({"scenario", "name"});
  if (name_it != entries.end() && name_it->second.value != "custom") {
    try {
      spec = preset(name_it->second.value);
    } catch (const ConfigError& e) {
      fail(source + ":" + std::to_string(name_it->second.line), e.what());
    }
  }
  for (const Field& f : fields()) {
    const auto it = entries.find({f.section, f.key});
    if (it == entries.end()) continue;
    const std::string where = source + ":" + std::to_string(it->second.line);
    if (!f.applies(spec)) fail(where, "key '" + f.key + "' does not apply to this [" + f.section + "] setup");
    const double old_Lx = spec.domain.Lx, old_Ly = spec.domain.Ly;
    f.set(spec, it->second.value, where);
    if (spec.domain.Lx != old_Lx) {
      stretch_side(spec.domain.sides[mesh::Bottom], spec.domain.Lx);
      stretch_side(spec.domain.sides[mesh::Top], spec.domain.Lx);
    }
    if (spec.domain.Ly != old_Ly) {
      stretch_side(spec.domain.sides[mesh::Left], spec.domain.Ly);
      stretch_side(spec.domain.sides[mesh::Right], spec.domain.Ly);
    }
  }
  validate(spec);
  return spec;
}

ScenarioSpec load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str(), path);
}

std::string serialize(const ScenarioSpec& spec) {
  std::string out, section;
  for (const Field& f : fields()) {
    if (!f.applies(spec)) continue;
    if (f.section != section) {
      out += (out.empty() ? "[" : "\n[") + f.section + "]\n";
      section = f.section;
    }
    out += f.key + " = " + f.get(spec) + "\n";
  }
  return out;
}

void validate(const ScenarioSpec& s) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(s.domain.Lx, "domain.Lx");
  positive(s.domain.Ly, "domain.Ly");
  positive(s.geometry.thickness(), "body.e");
  positive(s.geometry.L_r, "body.L_r");
  positive(s.geometry.S, "body.S");
  if (const auto* h = std::get_if<kin::RoundedLeftWithHead>(&s.geometry.shape)) {
    positive(h->beta_d, "body.beta_d");
    positive(h->beta_h, "body.beta_h");
  }
  if (s.n_el < 1) throw ConfigError("rod.n_el must be at least 1");
  positive(s.law.C_eps, "rod.C_eps");
  positive(s.law.C_kappa, "rod.C_kappa");
  const int n_dofs = 4 * (s.n_el + 1);
  for (const int d : s.locked_dofs)
    if (d < 0 || d >= n_dofs) throw ConfigError("rod.locked: dof " + std::to_string(d) + " out of range");
  if (s.friction) positive(s.friction->beta, "fluid.beta");
  else fluid::check_rheology(s.rheology);
  positive(s.sizing.h_wet, "mesh.h_wet");
  if (!(s.sizing.growth >= 1.0)) throw ConfigError("mesh.growth must be at least 1");
  if (!(s.sizing.h_max >= s.sizing.h_wet)) throw ConfigError("mesh.h_max must be at least mesh.h_wet");
  positive(s.sizing.refine_angle, "mesh.refine_angle");
  if (s.sizing.max_steiner < 1) throw ConfigError("mesh.max_steiner must be at least 1");
  positive(s.scheme.dt, "scheme.dt");
  positive(s.scheme.dt_min, "scheme.dt_min");
  if (!(s.scheme.dt_max >= s.scheme.dt_min)) throw ConfigError("scheme.dt_max must be at least scheme.dt_min");
  positive(s.scheme.zeta, "scheme.zeta");
  positive(s.scheme.f_tol, "scheme.f_tol");
  if (s.scheme.max_outer < 1 || s.scheme.krylov_restart < 1 || s.scheme.max_krylov < 1)
    throw ConfigError("scheme iteration limits must be at least 1");
  if (!(s.scheme.fd_step >= 0.0)) throw ConfigError("scheme.fd_step must be non-negative");
  if (!(s.output.t_end >= 0.0)) throw ConfigError("output.t_end must be non-negative");
  if (s.output.vtk_every < 0) throw ConfigError("output.vtk_every must be non-negative");
  bool has_inlet = false;
  for (const auto& side : s.domain.sides)
    for (const auto& p : side) has_inlet |= p.tag == BoundaryTag::Inlet;
  if (has_inlet && !s.inlet.enabled && !s.friction)
    throw ConfigError("domain has inlet pieces but [inlet] enabled = false");
  if (s.inlet.enabled && !has_inlet) throw ConfigError("[inlet] enabled but the domain has no inlet pieces");
}

}  // namespace rodfsi::io
