#pragma once

// Command-line front end. Exit codes: 0 affirmative result, 1 negative result
// (not an equilibrium, no dominance, no particularly cooperative equilibrium),
// 2 usage or input error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "toleq/dilemmas.hpp"
#include "toleq/equilibrium.hpp"
#include "toleq/io.hpp"
#include "toleq/pd_tolerant.hpp"
#include "toleq/tolerance.hpp"

namespace toleq::cli {

enum ExitCode : int { kAffirmative = 0, kNegative = 1, kInputError = 2 };

struct DilemmaFlags {
  std::string spec_file;
  std::string kind;
  double b = 0, c = 0, rho = 0;
  int L = 0, H = 0, bonus = 0, N = 0, n = 0, levels = 1;

  void add_to(CLI::App* app) {
    app->add_option("--spec", spec_file, "Dilemma JSON file");
    app->add_option("--kind", kind, "pd | td | pg | bertrand");
    app->add_option("--b", b, "PD benefit");
    app->add_option("--c", c, "PD cost");
    app->add_option("--L", L, "TD/Bertrand lower bound");
    app->add_option("--H", H, "TD/Bertrand upper bound");
    app->add_option("--bonus", bonus, "TD bonus/penalty");
    app->add_option("--N", N, "Public goods players");
    app->add_option("--rho", rho, "Public goods marginal return");
    app->add_option("--levels", levels, "Public goods contribution levels");
    app->add_option("--n", n, "Bertrand firms");
  }

  DilemmaSpec resolve() const {
    if (!spec_file.empty()) return io::dilemma_from_json(io::read_json_file(spec_file), spec_file);
    DilemmaSpec spec;
    if (kind == "pd") spec = PrisonersDilemma{b, c};
    else if (kind == "td") spec = TravelersDilemma{L, H, bonus};
    else if (kind == "pg") spec = PublicGoods{N, rho, levels};
    else if (kind == "bertrand") spec = Bertrand{n, L, H};
    else throw io::SchemaError("--kind must be one of pd, td, pg, bertrand (or pass --spec)");
    validate(spec);
    return spec;
  }
};

struct Options {
  std::string game_file, profile_file, pi_file, pi_prime_file, g_file, cdf_file, out_file;
  std::string format = "text";
  std::size_t grid = 10000;
  double tol_root = 1e-12;
  std::size_t samples = 0;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps;
  std::optional<double> beta;
  std::optional<std::size_t> player;
  double a = 0, b = 0, c = 0, d = 0;
  std::size_t curve_points = 200;
  std::vector<double> t_rel;
  std::string param;
  std::vector<double> values;
  std::optional<double> from, to;
  std::size_t steps = 10;
  double q = 1.0;
  DilemmaFlags dilemma;
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"Tolerance-based equilibria: verification, remapping, social-dilemma thresholds and PD fixed points"};
    app.require_subcommand(1, 1);
    app.add_option("--eps", opt_.eps, "Numeric comparison slack (overrides TOLEQ_EPSNUM)");

    auto* verify = app.add_subcommand("verify", "Check whether a profile is a pi-tolerant equilibrium");
    verify->add_option("--game", opt_.game_file, "Game JSON")->required();
    verify->add_option("--profile", opt_.profile_file, "Mixed profile JSON")->required();
    verify->add_option("--pi", opt_.pi_file, "Tolerance profile JSON")->required();
    verify->add_option("--out", opt_.out_file, "Write the verdict here instead of stdout");

    auto* remap = app.add_subcommand("remap", "Carry a type-to-strategy map to a dominating distribution");
    remap->add_option("--pi", opt_.pi_file, "Source discrete distribution")->required();
    remap->add_option("--pi-prime", opt_.pi_prime_file, "Dominating discrete distribution")->required();
    remap->add_option("--g", opt_.g_file, "Type map on the source atoms")->required();
    remap->add_option("--game", opt_.game_file, "Optional game for a full consistency check");
    remap->add_option("--profile", opt_.profile_file, "Optional profile for a full consistency check");
    remap->add_option("--player", opt_.player, "Player whose map this is (with --game/--profile)");
    remap->add_option("--out", opt_.out_file, "Write the remapped map here instead of stdout");

    auto* pd = app.add_subcommand("pd-solve", "Particularly cooperative equilibria of a tolerant PD");
    pd->add_option("--a", opt_.a, "Payoff of (C,C)")->required();
    pd->add_option("--b", opt_.b, "Payoff of (C,D)")->required();
    pd->add_option("--c", opt_.c, "Payoff of (D,C)")->required();
    pd->add_option("--d", opt_.d, "Payoff of (D,D)")->required();
    pd->add_option("--cdf", opt_.cdf_file, "Tolerance distribution JSON")->required();
    pd->add_option("--grid", opt_.grid, "Root-scan grid cells")->capture_default_str();
    pd->add_option("--tol", opt_.tol_root, "Root residual tolerance")->capture_default_str();
    pd->add_option("--out", opt_.out_file, "Write the alpha/lhs/rhs curve CSV here");
    pd->add_option("--curve-points", opt_.curve_points, "Curve CSV intervals")->capture_default_str();
    pd->add_option("--format", opt_.format, "text | json")->capture_default_str();

    auto* threshold = app.add_subcommand("threshold", "Tolerance needed to cooperate in a social dilemma");
    opt_.dilemma.add_to(threshold);
    threshold->add_option("--beta", opt_.beta, "Believed cooperation probability of others");
    threshold->add_option("--t-rel", opt_.t_rel, "Relative tolerances to classify (C disposition)")->delimiter(',');

    auto* sweep = app.add_subcommand("sweep", "Cooperation rates or PD equilibria across a parameter range");
    opt_.dilemma.add_to(sweep);
    sweep->add_option("--param", opt_.param, "Parameter to sweep")->required();
    sweep->add_option("--values", opt_.values, "Explicit values")->delimiter(',');
    sweep->add_option("--from", opt_.from, "Range start");
    sweep->add_option("--to", opt_.to, "Range end");
    sweep->add_option("--steps", opt_.steps, "Range intervals")->capture_default_str();
    sweep->add_option("--beta", opt_.beta, "Pin every type's belief to beta");
    sweep->add_option("--q", opt_.q, "Probability of a cooperative disposition")->capture_default_str();
    sweep->add_option("--samples", opt_.samples, "Monte Carlo samples per value (0 = exact only)");
    sweep->add_option("--seed", opt_.seed, "Seed, required with --samples");
    sweep->add_option("--pa", opt_.a, "PD-tolerant: payoff of (C,C)");
    sweep->add_option("--pb", opt_.b, "PD-tolerant: payoff of (C,D)");
    sweep->add_option("--pc", opt_.c, "PD-tolerant: payoff of (D,C)");
    sweep->add_option("--pd", opt_.d, "PD-tolerant: payoff of (D,D)");
    sweep->add_option("--cdf", opt_.cdf_file, "PD-tolerant: continuous tolerance distribution");
    sweep->add_option("--grid", opt_.grid, "PD-tolerant: root-scan grid cells")->capture_default_str();
    sweep->add_option("--tol", opt_.tol_root, "PD-tolerant: root residual tolerance")->capture_default_str();
    sweep->add_option("--out", opt_.out_file, "Write CSV here instead of stdout");
    sweep->add_option("--format", opt_.format, "csv | json");

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      out_ << app.help();
      return kAffirmative;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << '\n';
      return kInputError;
    }

    try {
      tol_ = Tolerance::from_env();
      if (opt_.eps) {
        if (!(*opt_.eps >= 0.0)) throw io::SchemaError("--eps must be non-negative");
        tol_.eps = *opt_.eps;
      }
      if (verify->parsed()) return cmd_verify();
      if (remap->parsed()) return cmd_remap();
      if (pd->parsed()) return cmd_pd_solve();
      if (threshold->parsed()) return cmd_threshold();
      if (sweep->parsed()) return cmd_sweep();
    } catch (const DominanceError& e) {
      err_ << "error: " << e.what() << '\n';
      return kNegative;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << '\n';
      return kInputError;
    }
    return kInputError;
  }

 private:
  // Sends text to --out when given, otherwise to stdout.
  void emit(const std::string& text) {
    if (opt_.out_file.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(opt_.out_file, std::ios::binary);
    if (!f) throw io::SchemaError(opt_.out_file + ": cannot open for writing");
    f << text;
  }

  int cmd_verify() {
    const Game game = io::game_from_json(io::read_json_file(opt_.game_file), opt_.game_file);
    const MixedProfile profile = io::profile_from_json(io::read_json_file(opt_.profile_file), tol_, opt_.profile_file);
    const DiscreteToleranceProfile pi =
        io::pi_from_json(io::read_json_file(opt_.pi_file), game.num_players(), tol_, opt_.pi_file);
    const EquilibriumVerdict verdict = verify_tolerant_equilibrium(game, profile, pi, tol_);
    emit(io::to_json(verdict).dump(2) + "\n");
    if (verdict.violation) err_ << "violation: " << verdict.violation->describe() << '\n';
    return verdict.is_equilibrium ? kAffirmative : kNegative;
  }

  int cmd_remap() {
    const DiscreteToleranceDist lo = io::discrete_from_json(io::read_json_file(opt_.pi_file), tol_, opt_.pi_file);
    const DiscreteToleranceDist hi =
        io::discrete_from_json(io::read_json_file(opt_.pi_prime_file), tol_, opt_.pi_prime_file);
    const TypeStrategyMap g = io::type_map_from_json(io::read_json_file(opt_.g_file), tol_, opt_.g_file);
    const TypeStrategyMap remapped = dominance_remap(lo, hi, g, tol_);

    // E2: the overall mixture is unchanged.
    const auto before = g.mixture(lo);
    const auto after = remapped.mixture(hi);
    for (std::size_t s = 0; s < before.size(); ++s) {
      if (std::abs(before[s] - after[s]) > 1e-9) throw std::runtime_error("remap changed the mixture");
    }
    // E1: only strategies of atoms no larger than the target appear.
    const RemapPlan plan = dominance_remap_plan(lo, hi, tol_);
    for (std::size_t j = 0; j < hi.size(); ++j) {
      for (std::size_t h = 0; h < lo.size(); ++h) {
        if (plan.weights[j][h] > 0.0 && lo.support()[h] > hi.support()[j] + tol_.eps) {
          throw std::runtime_error("remap moved mass to a lower tolerance");
        }
      }
    }
    if (!opt_.game_file.empty() || !opt_.profile_file.empty()) {
      if (opt_.game_file.empty() || opt_.profile_file.empty() || !opt_.player) {
        throw io::SchemaError("--game, --profile and --player must be given together");
      }
      const Game game = io::game_from_json(io::read_json_file(opt_.game_file), opt_.game_file);
      const MixedProfile profile = io::profile_from_json(io::read_json_file(opt_.profile_file), tol_, opt_.profile_file);
      check_profile(game, profile);
      if (*opt_.player >= game.num_players()) throw io::SchemaError("--player out of range");
      const auto r = regrets(game, profile, *opt_.player);
      for (std::size_t j = 0; j < remapped.atoms.size(); ++j) {
        const auto& s = remapped.strategies[j];
        if (s.size() != r.size()) throw io::SchemaError("type map strategies do not match the game");
        for (std::size_t k = 0; k < r.size(); ++k) {
          if (s[k] > 0.0 && !approx_le(r[k], remapped.atoms[j], tol_)) {
            throw std::runtime_error("remapped type " + io::format_number(remapped.atoms[j]) +
                                     " plays an inconsistent strategy");
          }
        }
      }
    }
    emit(io::to_json(remapped).dump(2) + "\n");
    return kAffirmative;
  }

  int cmd_pd_solve() {
    const PdPayoffs p(opt_.a, opt_.b, opt_.c, opt_.d);
    const DistributionSpec dist = io::distribution_from_json(io::read_json_file(opt_.cdf_file), tol_, opt_.cdf_file);
    const bool json_out = opt_.format == "json" || opt_.format == "structured-object";
    if (!json_out && opt_.format != "text") throw io::SchemaError("--format must be text or json");
    std::ostringstream report;
    io::json doc{{"delta_c", p.delta_c()}, {"delta_d", p.delta_d()}};
    int code = kAffirmative;

    if (const auto* discrete = std::get_if<DiscreteToleranceDist>(&dist)) {
      const std::vector<double> alphas = solve_discrete(p, *discrete, tol_);
      doc["distribution"] = "discrete";
      doc["solutions"] = alphas;
      doc["exists"] = !alphas.empty();
      report << "distribution: discrete\n";
      if (alphas.empty()) {
        report << "NON-EXISTENCE: no particularly cooperative equilibrium\n";
        code = kNegative;
      }
      for (double a : alphas) report << "root: alpha=" << io::format_number(a) << '\n';
      if (!opt_.out_file.empty()) {
        std::ofstream f(opt_.out_file, std::ios::binary);
        if (!f) throw io::SchemaError(opt_.out_file + ": cannot open for writing");
        f << "alpha,lhs,rhs\n";
        for (double a : linspace(0.0, 1.0, opt_.curve_points)) {
          f << io::format_number(a) << ',' << io::format_number(1.0 - a) << ','
            << io::format_number(discrete->strict_cdf(willingness_gap(p, a), tol_)) << '\n';
        }
      }
    } else {
      const ToleranceCdf& F = std::get<ToleranceCdf>(dist);
      const FixedPointReport r = solve_symmetric(p, F, {opt_.grid, opt_.tol_root}, tol_);
      doc["distribution"] = "continuous";
      doc["classification"] = to_string(r.classification);
      doc["uniqueness_certified"] = r.uniqueness_certified;
      doc["has_zero_root"] = r.has_zero_root;
      io::json roots = io::json::array();
      report << "distribution: continuous\n"
             << "classification: " << to_string(r.classification) << '\n'
             << "uniqueness_certified: " << (r.uniqueness_certified ? "true" : "false") << '\n'
             << "has_zero_root: " << (r.has_zero_root ? "true" : "false") << '\n';
      for (const auto& root : r.roots) {
        roots.push_back({{"alpha", root.alpha},
                         {"bracket", {root.bracket_lo, root.bracket_hi}},
                         {"residual", root.residual},
                         {"marginal", root.marginal}});
        report << "root: alpha=" << io::format_number(root.alpha) << " residual=" << io::format_number(root.residual)
               << " bracket=[" << io::format_number(root.bracket_lo) << ',' << io::format_number(root.bracket_hi)
               << "] marginal=" << (root.marginal ? 1 : 0) << '\n';
      }
      doc["roots"] = roots;
      if (!opt_.out_file.empty()) {
        std::ofstream f(opt_.out_file, std::ios::binary);
        if (!f) throw io::SchemaError(opt_.out_file + ": cannot open for writing");
        io::write_curve_csv(f, fixed_point_curve(p, F, opt_.curve_points));
      }
    }
    out_ << (json_out ? doc.dump(2) + "\n" : "delta_c: " + io::format_number(p.delta_c()) +
                                                  "\ndelta_d: " + io::format_number(p.delta_d()) + "\n" +
                                                  report.str());
    return code;
  }

  int cmd_threshold() {
    const DilemmaSpec spec = opt_.dilemma.resolve();
    if (requires_belief(spec) && !opt_.beta && std::holds_alternative<Bertrand>(spec)) {
      throw io::SchemaError("bertrand thresholds need --beta");
    }
    const double t = cooperation_threshold(spec, opt_.beta);
    std::ostringstream os;
    os << "threshold: " << io::format_number(t) << '\n'
       << "all_cooperate_payoff: " << io::format_number(all_cooperate_payoff(spec)) << '\n'
       << "relative_threshold: " << io::format_number(t / all_cooperate_payoff(spec)) << '\n';
    for (double tr : opt_.t_rel) {
      const RelativeType type{tr, opt_.beta.value_or(0.0), Disposition::Cooperate};
      bool coop;
      if (opt_.beta || !requires_belief(spec)) {
        coop = will_cooperate(spec, type, tol_);
      } else {
        coop = relative_to_absolute(spec, tr) >= t - tol_.eps;
      }
      os << "t_rel=" << io::format_number(tr) << " will_cooperate=" << (coop ? "true" : "false") << '\n';
    }
    out_ << os.str();
    return kAffirmative;
  }

  std::vector<double> sweep_values() const {
    if (!opt_.values.empty()) return opt_.values;
    if (!opt_.from || !opt_.to) throw io::SchemaError("sweep needs --values or --from/--to");
    if (opt_.steps == 0) throw io::SchemaError("--steps must be positive");
    return linspace(*opt_.from, *opt_.to, opt_.steps);
  }

  int cmd_sweep() {
    const std::vector<double> values = sweep_values();
    const bool json_out = opt_.format == "json" || opt_.format == "structured-object";
    if (!json_out && opt_.format != "csv" && opt_.format != "text") throw io::SchemaError("--format must be csv or json");
    std::ostringstream os;
    if (opt_.dilemma.kind == "pd-tolerant") {
      if (opt_.cdf_file.empty()) throw io::SchemaError("pd-tolerant sweeps need --cdf");
      const PdPayoffs base(opt_.a, opt_.b, opt_.c, opt_.d);
      const DistributionSpec dist = io::distribution_from_json(io::read_json_file(opt_.cdf_file), tol_, opt_.cdf_file);
      if (!std::holds_alternative<ToleranceCdf>(dist)) {
        throw io::SchemaError(opt_.cdf_file + ": pd-tolerant sweeps need a continuous distribution");
      }
      const auto rows = comparative_statics_sweep(base, std::get<ToleranceCdf>(dist),
                                                  parse_sweep_parameter(opt_.param), values,
                                                  {opt_.grid, opt_.tol_root}, tol_);
      if (json_out) {
        io::json arr = io::json::array();
        for (const auto& r : rows) {
          arr.push_back({{"param_value", r.value}, {"alpha_star", r.alpha_star}, {"branch_id", r.branch},
                         {"marginal_flag", r.marginal}});
        }
        os << arr.dump(2) << '\n';
      } else {
        io::write_sweep_csv(os, rows);
      }
    } else {
      if (opt_.samples > 0 && !opt_.seed) throw io::SchemaError("--seed is required with --samples");
      if (!(opt_.q >= 0.0 && opt_.q <= 1.0)) throw io::SchemaError("--q must lie in [0,1]");
      if (opt_.beta && !(*opt_.beta >= 0.0 && *opt_.beta <= 1.0)) throw io::SchemaError("--beta must lie in [0,1]");
      // The base spec is validated after the swept parameter is substituted.
      DilemmaSpec base = base_for_sweep(values.front());
      RelativeTypeDistribution dist;
      dist.q = opt_.q;
      dist.fixed_beta = opt_.beta;
      const auto rows =
          sweep_cooperation_rate(base, opt_.param, values, dist, opt_.samples, opt_.seed.value_or(0), tol_);
      if (json_out) {
        io::json arr = io::json::array();
        for (const auto& r : rows) {
          io::json row{{opt_.param, r.value}, {"exact_rate", r.exact_rate}};
          if (r.mc) {
            row["mc_rate"] = r.mc->mc_rate;
            row["mc_stderr"] = r.mc->mc_stderr;
          }
          arr.push_back(row);
        }
        os << arr.dump(2) << '\n';
      } else {
        io::write_rate_csv(os, opt_.param, rows);
      }
    }
    emit(os.str());
    return kAffirmative;
  }

  DilemmaSpec base_for_sweep(double first_value) const {
    DilemmaFlags flags = opt_.dilemma;
    if (!flags.spec_file.empty()) {
      return with_parameter(io::dilemma_from_json(io::read_json_file(flags.spec_file), flags.spec_file), opt_.param,
                            first_value);
    }
    const auto& k = flags.kind;
    const auto& p = opt_.param;
    auto as_int = [](double v) { return static_cast<int>(v); };
    if (k == "pd") {
      if (p == "b") flags.b = first_value; else if (p == "c") flags.c = first_value;
    } else if (k == "td") {
      if (p == "L") flags.L = as_int(first_value); else if (p == "H") flags.H = as_int(first_value);
      else if (p == "bonus" || p == "b") flags.bonus = as_int(first_value);
    } else if (k == "pg") {
      if (p == "N") flags.N = as_int(first_value); else if (p == "rho") flags.rho = first_value;
    } else if (k == "bertrand") {
      if (p == "n") flags.n = as_int(first_value); else if (p == "L") flags.L = as_int(first_value);
      else if (p == "H") flags.H = as_int(first_value);
    }
    return flags.resolve();
  }

  std::ostream& out_;
  std::ostream& err_;
  Options opt_;
  Tolerance tol_;
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return Runner(out, err).run(argc, argv);
}

}  // namespace toleq::cli
