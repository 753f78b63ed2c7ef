#pragma once

// JSON file formats and CSV tables.
//
// Game:      {"players": n, "strategies": [[label...]...], "payoffs": P}
//            P is nested n deep, indexed by player 0's strategy outermost,
//            and each innermost entry is the payoff vector [u_0, ..., u_{n-1}].
// Profile:   {"profile": [[p...], ...]}  (one mixed strategy per player)
// Tolerance: {"type": "discrete", "support": [...], "probs": [...]}
//            {"type": "uniform", "lo": x, "hi": y}
//            {"type": "piecewise_linear", "knots": [[x, F], ...]}
//            {"type": "truncated_exponential", "rate": r, "cap": c}
//            any of these may carry "shift": s (continuous families only).
// Pi:        {"pi": [dist, ...]} with one discrete dist per player, or a single
//            discrete dist object shared by every player.
// Type map:  {"atoms": [...], "strategies": [[p...], ...]}
// Dilemma:   {"kind": "pd", "b": 5, "c": 2} | {"kind": "td", "L", "H", "bonus"}
//            | {"kind": "pg", "N", "rho", "levels"?} | {"kind": "bertrand", "n", "L", "H"}

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <type_traits>
#include <string>
#include <vector>

#include <json.hpp>

#include "toleq/dilemmas.hpp"
#include "toleq/equilibrium.hpp"
#include "toleq/game.hpp"
#include "toleq/pd_tolerant.hpp"
#include "toleq/tolerance.hpp"

namespace toleq::io {

using json = nlohmann::json;

// Input that does not match a schema; the message names the offending field.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + ": missing field '" + key + "'");
  return *it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path + ": expected a number");
  return j.get<double>();
}

inline int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path + ": expected an integer");
  return j.get<int>();
}

inline std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

// Runs a constructor, re-raising invariant violations with the field path attached.
template <class Fn>
auto at(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const SchemaError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

inline void flatten_payoffs(const json& j, const std::vector<std::size_t>& counts, std::size_t depth,
                            const std::string& path, std::vector<double>& out) {
  if (!j.is_array()) throw SchemaError(path + ": expected an array");
  if (depth == counts.size()) {
    if (j.size() != counts.size()) {
      throw SchemaError(path + ": payoff vector needs " + std::to_string(counts.size()) + " entries");
    }
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], path + "[" + std::to_string(k) + "]"));
    return;
  }
  if (j.size() != counts[depth]) {
    throw SchemaError(path + ": expected " + std::to_string(counts[depth]) + " entries for player " +
                      std::to_string(depth));
  }
  for (std::size_t k = 0; k < j.size(); ++k) {
    flatten_payoffs(j[k], counts, depth + 1, path + "[" + std::to_string(k) + "]", out);
  }
}

inline json nest_payoffs(const Game& game, std::size_t depth, std::size_t base) {
  json arr = json::array();
  if (depth == game.num_players()) {
    for (std::size_t i = 0; i < game.num_players(); ++i) arr.push_back(game.payoff(base, i));
    return arr;
  }
  for (std::size_t s = 0; s < game.num_strategies(depth); ++s) {
    arr.push_back(nest_payoffs(game, depth + 1, base + s * game.stride(depth)));
  }
  return arr;
}

}  // namespace detail

inline json parse_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(source + ": " + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

// ---- Game

inline json to_json(const Game& game) {
  return json{{"players", game.num_players()},
              {"strategies", game.strategy_labels()},
              {"payoffs", detail::nest_payoffs(game, 0, 0)}};
}

inline Game game_from_json(const json& j, const std::string& path = "game") {
  const int n = detail::integer(detail::field(j, "players", path), path + ".players");
  if (n < 1) throw SchemaError(path + ".players: must be positive");
  const json& strategies = detail::field(j, "strategies", path);
  if (!strategies.is_array() || strategies.size() != static_cast<std::size_t>(n)) {
    throw SchemaError(path + ".strategies: expected one label list per player");
  }
  std::vector<std::vector<std::string>> labels;
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    const std::string p = path + ".strategies[" + std::to_string(i) + "]";
    if (!strategies[i].is_array() || strategies[i].empty()) throw SchemaError(p + ": expected a non-empty list");
    std::vector<std::string> row;
    for (const auto& l : strategies[i]) {
      if (!l.is_string()) throw SchemaError(p + ": labels must be strings");
      row.push_back(l.get<std::string>());
    }
    counts.push_back(row.size());
    labels.push_back(std::move(row));
  }
  std::vector<double> flat;
  detail::flatten_payoffs(detail::field(j, "payoffs", path), counts, 0, path + ".payoffs", flat);
  return detail::at(path, [&] { return Game(std::move(labels), std::move(flat)); });
}

// ---- Profiles

inline json to_json(const MixedProfile& profile) {
  json arr = json::array();
  for (const auto& s : profile) arr.push_back(s.probs());
  return json{{"profile", arr}};
}

inline MixedProfile profile_from_json(const json& j, const Tolerance& tol = {}, const std::string& path = "profile") {
  const json& arr = detail::field(j, "profile", path);
  if (!arr.is_array()) throw SchemaError(path + ".profile: expected an array");
  MixedProfile out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = path + ".profile[" + std::to_string(i) + "]";
    auto probs = detail::numbers(arr[i], p);
    out.push_back(detail::at(p, [&] { return MixedStrategy(std::move(probs), tol); }));
  }
  return out;
}

// ---- Tolerance distributions

inline json to_json(const DiscreteToleranceDist& d) {
  return json{{"type", "discrete"}, {"support", d.support()}, {"probs", d.probs()}};
}

inline json to_json(const ToleranceCdf& cdf) {
  json out = std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, UniformCdf>) {
          return json{{"type", "uniform"}, {"lo", f.lo}, {"hi", f.hi}};
        } else if constexpr (std::is_same_v<T, PiecewiseLinearCdf>) {
          json knots = json::array();
          for (const auto& [x, y] : f.knots) knots.push_back(json::array({x, y}));
          return json{{"type", "piecewise_linear"}, {"knots", knots}};
        } else {
          return json{{"type", "truncated_exponential"}, {"rate", f.rate}, {"cap", f.cap}};
        }
      },
      cdf.family());
  if (cdf.shift() != 0.0) out["shift"] = cdf.shift();
  return out;
}

inline json to_json(const DistributionSpec& d) {
  return std::visit([](const auto& v) { return to_json(v); }, d);
}

inline DistributionSpec distribution_from_json(const json& j, const Tolerance& tol = {},
                                               const std::string& path = "distribution") {
  const json& type_field = detail::field(j, "type", path);
  if (!type_field.is_string()) throw SchemaError(path + ".type: expected a string");
  const std::string type = type_field.get<std::string>();
  auto num = [&](const char* key) { return detail::number(detail::field(j, key, path), path + "." + key); };
  if (type == "discrete") {
    if (j.contains("shift")) throw SchemaError(path + ".shift: only continuous families can be shifted");
    auto support = detail::numbers(detail::field(j, "support", path), path + ".support");
    auto probs = detail::numbers(detail::field(j, "probs", path), path + ".probs");
    return detail::at(path, [&] { return DiscreteToleranceDist(std::move(support), std::move(probs), tol); });
  }
  const double shift = j.contains("shift") ? num("shift") : 0.0;
  return detail::at(path, [&]() -> DistributionSpec {
    if (type == "uniform") return ToleranceCdf(UniformCdf{num("lo"), num("hi")}, shift);
    if (type == "truncated_exponential") return ToleranceCdf(TruncatedExponentialCdf{num("rate"), num("cap")}, shift);
    if (type == "piecewise_linear") {
      const json& knots = detail::field(j, "knots", path);
      if (!knots.is_array()) throw SchemaError(path + ".knots: expected an array of [x, F] pairs");
      std::vector<std::pair<double, double>> pts;
      for (std::size_t k = 0; k < knots.size(); ++k) {
        const auto xy = detail::numbers(knots[k], path + ".knots[" + std::to_string(k) + "]");
        if (xy.size() != 2) throw SchemaError(path + ".knots[" + std::to_string(k) + "]: expected [x, F]");
        pts.emplace_back(xy[0], xy[1]);
      }
      return ToleranceCdf(PiecewiseLinearCdf{std::move(pts)}, shift);
    }
    throw SchemaError(path + ".type: unknown distribution type '" + type + "'");
  });
}

inline DiscreteToleranceDist discrete_from_json(const json& j, const Tolerance& tol = {},
                                                const std::string& path = "distribution") {
  DistributionSpec d = distribution_from_json(j, tol, path);
  if (!std::holds_alternative<DiscreteToleranceDist>(d)) {
    throw SchemaError(path + ": expected a discrete distribution");
  }
  return std::get<DiscreteToleranceDist>(std::move(d));
}

inline json to_json(const DiscreteToleranceProfile& pi) {
  json arr = json::array();
  for (const auto& d : pi) arr.push_back(to_json(d));
  return json{{"pi", arr}};
}

// A profile file, or a single distribution replicated for `players` players.
inline DiscreteToleranceProfile pi_from_json(const json& j, std::size_t players, const Tolerance& tol = {},
                                             const std::string& path = "pi") {
  if (j.is_object() && j.contains("type")) {
    return DiscreteToleranceProfile(players, discrete_from_json(j, tol, path));
  }
  const json& arr = detail::field(j, "pi", path);
  if (!arr.is_array()) throw SchemaError(path + ".pi: expected an array");
  DiscreteToleranceProfile out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(discrete_from_json(arr[i], tol, path + ".pi[" + std::to_string(i) + "]"));
  }
  return out;
}

// ---- Type maps and verdicts

inline json to_json(const TypeStrategyMap& g) {
  json strategies = json::array();
  for (const auto& s : g.strategies) strategies.push_back(s.probs());
  return json{{"atoms", g.atoms}, {"strategies", strategies}};
}

inline TypeStrategyMap type_map_from_json(const json& j, const Tolerance& tol = {}, const std::string& path = "g") {
  TypeStrategyMap g;
  g.atoms = detail::numbers(detail::field(j, "atoms", path), path + ".atoms");
  const json& arr = detail::field(j, "strategies", path);
  if (!arr.is_array()) throw SchemaError(path + ".strategies: expected an array");
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string p = path + ".strategies[" + std::to_string(k) + "]";
    auto probs = detail::numbers(arr[k], p);
    g.strategies.push_back(detail::at(p, [&] { return MixedStrategy(std::move(probs), tol); }));
  }
  if (g.atoms.size() != g.strategies.size()) throw SchemaError(path + ": atoms and strategies differ in length");
  if (g.atoms.empty()) throw SchemaError(path + ": empty type map");
  return g;
}

inline json to_json(const Violation& v) {
  json out{{"player", v.player},
           {"kind", v.kind == Violation::Kind::Threshold ? "threshold" : "unsupported_strategy"},
           {"threshold", v.threshold},
           {"excess", v.excess},
           {"message", v.describe()}};
  if (v.strategy) out["strategy"] = *v.strategy;
  return out;
}

inline json to_json(const EquilibriumVerdict& verdict) {
  json out{{"equilibrium", verdict.is_equilibrium}};
  if (verdict.witness) {
    json w = json::array();
    for (const auto& g : *verdict.witness) w.push_back(to_json(g));
    out["witness"] = w;
  }
  if (verdict.violation) out["violation"] = to_json(*verdict.violation);
  return out;
}

// ---- Dilemmas

inline json to_json(const DilemmaSpec& spec) {
  struct {
    json operator()(const PrisonersDilemma& g) const { return {{"kind", "pd"}, {"b", g.b}, {"c", g.c}}; }
    json operator()(const TravelersDilemma& g) const {
      return {{"kind", "td"}, {"L", g.L}, {"H", g.H}, {"bonus", g.bonus}};
    }
    json operator()(const PublicGoods& g) const {
      return {{"kind", "pg"}, {"N", g.N}, {"rho", g.rho}, {"levels", g.levels}};
    }
    json operator()(const Bertrand& g) const { return {{"kind", "bertrand"}, {"n", g.n}, {"L", g.L}, {"H", g.H}}; }
  } conv;
  return std::visit(conv, spec);
}

inline DilemmaSpec dilemma_from_json(const json& j, const std::string& path = "dilemma") {
  const json& kind_field = detail::field(j, "kind", path);
  if (!kind_field.is_string()) throw SchemaError(path + ".kind: expected a string");
  const std::string kind = kind_field.get<std::string>();
  auto num = [&](const char* key) { return detail::number(detail::field(j, key, path), path + "." + key); };
  auto integer = [&](const char* key) { return detail::integer(detail::field(j, key, path), path + "." + key); };
  DilemmaSpec spec;
  if (kind == "pd") {
    spec = PrisonersDilemma{num("b"), num("c")};
  } else if (kind == "td") {
    spec = TravelersDilemma{integer("L"), integer("H"), integer("bonus")};
  } else if (kind == "pg") {
    spec = PublicGoods{integer("N"), num("rho"), j.contains("levels") ? integer("levels") : 1};
  } else if (kind == "bertrand") {
    spec = Bertrand{integer("n"), integer("L"), integer("H")};
  } else {
    throw SchemaError(path + ".kind: unknown dilemma '" + kind + "'");
  }
  detail::at(path, [&] { validate(spec); return 0; });
  return spec;
}

// ---- CSV

// Shortest decimal text that reads back to the same double.
inline std::string format_number(double v) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve) {
  os << "alpha,lhs,rhs\n";
  for (const auto& p : curve) os << format_number(p.alpha) << ',' << format_number(p.lhs) << ',' << format_number(p.rhs) << '\n';
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "param_value,alpha_star,branch_id,marginal_flag\n";
  for (const auto& r : rows) {
    os << format_number(r.value) << ',' << format_number(r.alpha_star) << ',' << r.branch << ','
       << (r.marginal ? 1 : 0) << '\n';
  }
}

inline void write_rate_csv(std::ostream& os, const std::string& parameter, const std::vector<RateSweepRow>& rows) {
  os << parameter << ",exact_rate,mc_rate,mc_stderr\n";
  for (const auto& r : rows) {
    os << format_number(r.value) << ',' << format_number(r.exact_rate) << ',';
    if (r.mc) os << format_number(r.mc->mc_rate) << ',' << format_number(r.mc->mc_stderr);
    else os << ',';
    os << '\n';
  }
}

}  // namespace toleq::io
