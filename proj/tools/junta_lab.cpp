// junta-lab: command-line front end for the junta library.
//
// Exit codes: 0 success, 1 a verification failed, 2 usage or parameter error.

#include "junta/boolfn.hpp"
#include "junta/constructions.hpp"
#include "junta/delta.hpp"
#include "junta/exactprob.hpp"
#include "junta/lemmas.hpp"
#include "junta/rational.hpp"
#include "junta/rng.hpp"
#include "junta/testers.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;
using namespace junta;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json rat(const Rational& q) { return {{"value", to_string(q)}, {"float", to_double(q)}}; }

json key_values(const KeyValues& kv) {
  json j = json::object();
  for (const auto& [k, v] : kv) j[k] = v;
  return j;
}

json params_json(const HardInstanceParams& hp) {
  return {{"k", hp.k}, {"ell", hp.ell}, {"r", hp.r}, {"p", rat(hp.p)}, {"p_used", hp.p_used},
          {"d", hp.d}, {"variant", to_string(hp.variant)}, {"n", hp.n()}};
}

json varset_json(const VarSet& s) { return s.indices(); }

json lemma_json(const LemmaReport& rep) {
  json inst = json::array();
  for (const auto& i : rep.instances) {
    json row = {{"inputs", key_values(i.inputs)}, {"lhs", i.lhs}, {"relation", i.relation}, {"rhs", i.rhs},
                {"verdict", i.verdict ? "pass" : "fail"}};
    if (i.counterexample) row["counterexample"] = *i.counterexample;
    inst.push_back(std::move(row));
  }
  return {{"lemma_id", rep.lemma_id},
          {"settings", key_values(rep.settings)},
          {"instances", std::move(inst)},
          {"summary", {{"passed", rep.passed()}, {"failed", rep.failed()}, {"ok", rep.ok()}}}};
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

void write_lemma_csv(const std::string& path, const std::vector<LemmaReport>& reports) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open " + path);
  out << "lemma_id,index,inputs,lhs,relation,rhs,verdict\n";
  for (const auto& rep : reports)
    for (std::size_t i = 0; i < rep.instances.size(); ++i) {
      const auto& in = rep.instances[i];
      std::string inputs;
      for (const auto& [k, v] : in.inputs) inputs += (inputs.empty() ? "" : ";") + k + "=" + v;
      out << rep.lemma_id << ',' << i << ',' << csv_escape(inputs) << ',' << csv_escape(in.lhs) << ',' << in.relation
          << ',' << csv_escape(in.rhs) << ',' << (in.verdict ? "pass" : "fail") << '\n';
    }
}

TruthTable load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open truth table " + path);
  return read_truth_table(in);
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open " + path + " for writing");
  out << text;
}

VarSet parse_varset(const std::string& text) {
  std::vector<int> idx;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    idx.push_back(std::stoi(item, &used));
    if (used != item.size()) throw UsageError("malformed variable list '" + text + "'");
  }
  std::sort(idx.begin(), idx.end());
  return VarSet(std::move(idx));
}

// Options shared by every subcommand.
struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string csv;
};

// Hard-instance flags shared by sample, separation and advantage.
struct InstanceFlags {
  int k = 0;
  int ell = 0;
  int r = 0;
  std::string p = "0";
  int d = 0;
  std::string variant = "parity";

  void attach(CLI::App* app) {
    app->add_option("--k", k, "junta size k")->required();
    app->add_option("--ell", ell, "|J|")->required();
    app->add_option("--r", r, "size of the Bernoulli prefix [r]")->required();
    app->add_option("--p", p, "Bernoulli bias, e.g. 3/16 or 0.1875");
    app->add_option("--d", d, "coloring radius (colored variant)");
    app->add_option("--variant", variant, "parity or colored");
  }

  HardInstanceParams params() const {
    HardInstanceParams hp;
    hp.k = k;
    hp.ell = ell;
    hp.r = r;
    hp.p = parse_rational(p);
    hp.d = d;
    hp.variant = parse_variant(variant);
    hp.p_used = r > 0;
    hp.validate();
    return hp;
  }
};

int emit(const Common& c, json report, const std::string& command, double seconds, bool ok = true) {
  json doc;
  doc["command"] = command;
  doc["seed"] = c.seed;
  for (auto& [k, v] : report.items()) doc[k] = std::move(v);
  doc["timing"] = {{"seconds", seconds}};
  const std::string text = doc.dump(2) + "\n";
  if (c.out.empty())
    std::cout << text;
  else
    save_text(c.out, text);
  return ok ? kExitOk : kExitVerificationFailed;
}

std::vector<LemmaReport> run_suite(const std::string& name, Seed seed) {
  std::vector<LemmaReport> out;
  out.push_back(check_delta_properties());
  out.push_back(check_k_wise_distance());
  out.push_back(check_indistinguishability(Variant::Parity, seed));
  out.push_back(check_indistinguishability(Variant::Colored, seed));
  out.push_back(check_lifting(seed));
  out.push_back(check_radial_coloring());
  out.push_back(check_bucket_expectation(seed));
  out.push_back(check_collision_bound(seed));
  out.push_back(check_unbalanced_distance(seed));
  out.push_back(check_parameter_derivation());
  if (name == "full") {
    out.push_back(check_estimator_concentration(seed));
    out.push_back(check_ball_tester(seed));
    out.push_back(check_distance_separation(separation_params(), seed));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.lemma_id < b.lemma_id; });
  return out;
}

LemmaReport run_lemma(const std::string& id, const std::map<std::string, std::string>& args, Seed seed) {
  auto int_arg = [&](const std::string& key, long fallback) {
    auto it = args.find(key);
    return it == args.end() || it->second.empty() ? fallback : std::stol(it->second);
  };
  if (id == "delta-properties") return check_delta_properties(static_cast<std::uint64_t>(int_arg("t-max", kDeltaExactMax)));
  if (id == "k-wise-distance") {
    const long n = int_arg("n", 0);
    return n > 0 ? check_k_wise_distance({static_cast<int>(n)}) : check_k_wise_distance();
  }
  if (id == "almost-same-distribution" || id == "weak-gap-almost-same-distribution") {
    IndistinguishabilityOptions opt;
    opt.query_sets = static_cast<std::uint64_t>(int_arg("trials", 1000));
    return check_indistinguishability(id == "almost-same-distribution" ? Variant::Parity : Variant::Colored, seed, opt);
  }
  if (id == "lifting") return check_lifting(seed, static_cast<std::uint64_t>(int_arg("trials", 200)));
  if (id == "radial-coloring") return check_radial_coloring(static_cast<int>(int_arg("ell", 12)), static_cast<int>(int_arg("d", 3)));
  if (id == "random-bucket-expectation") return check_bucket_expectation(seed, static_cast<std::uint64_t>(int_arg("trials", 1000)));
  if (id == "query-lower-bound") return check_collision_bound(seed, static_cast<std::uint64_t>(int_arg("trials", 500)));
  if (id == "unbalanced-distance-to-constant") return check_unbalanced_distance(seed, static_cast<std::uint64_t>(int_arg("trials", 200)));
  if (id == "parameter-derivation") return check_parameter_derivation();
  if (id == "k-wise-limit") return check_estimator_concentration(seed, static_cast<std::uint64_t>(int_arg("trials", 200)));
  if (id == "testing-random-functions") {
    BallCheckOptions opt;
    opt.trials = static_cast<std::uint64_t>(int_arg("trials", 100));
    return check_ball_tester(seed, opt);
  }
  if (id == "distance-separation") return check_distance_separation(separation_params(), seed, static_cast<std::uint64_t>(int_arg("trials", 500)));
  throw UsageError("unknown lemma id '" + id + "'");
}

const char* kLemmaIds =
    "delta-properties, k-wise-distance, almost-same-distribution, weak-gap-almost-same-distribution, lifting, "
    "radial-coloring, random-bucket-expectation, query-lower-bound, unbalanced-distance-to-constant, "
    "parameter-derivation, k-wise-limit, testing-random-functions, distance-separation";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and Monte Carlo experiments on hard instances for tolerant junta testing"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "64-bit seed (echoed in the report)");
    sub->add_option("--out", common.out, "write the JSON report here instead of stdout");
  };

  // delta
  auto* delta_cmd = app.add_subcommand("delta", "Delta_t, exact for t <= 4096");
  std::uint64_t delta_t = 0;
  delta_cmd->add_option("--t", delta_t, "t >= 1")->required();
  add_common(delta_cmd);

  // params
  auto* params_cmd = app.add_subcommand("params", "derive construction parameters");
  std::string params_mode = "tolerant", eps1_text, eps2_text, gamma_text;
  long params_k = 0;
  std::string record_path;
  params_cmd->add_option("--mode", params_mode, "tolerant, weak-gap or relaxed");
  params_cmd->add_option("--k", params_k, "k")->required();
  params_cmd->add_option("--eps1", eps1_text, "eps1 (exact decimal or fraction)")->required();
  params_cmd->add_option("--eps2", eps2_text, "eps2")->required();
  params_cmd->add_option("--gamma", gamma_text, "gamma (relaxed mode)");
  params_cmd->add_option("--record", record_path, "also write the flat key=value params record");
  add_common(params_cmd);

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "draw a function from D_YES or D_NO");
  InstanceFlags sample_flags;
  sample_flags.attach(sample_cmd);
  std::string sample_dist = "no", sample_table;
  sample_cmd->add_option("--dist", sample_dist, "yes or no");
  sample_cmd->add_option("--table", sample_table, "write the sampled truth table here");
  add_common(sample_cmd);

  // distance
  auto* distance_cmd = app.add_subcommand("distance", "exact distance to k-juntas");
  std::string distance_fn, distance_set;
  int distance_k = -1;
  distance_cmd->add_option("--fn", distance_fn, "truth-table file")->required();
  distance_cmd->add_option("--k", distance_k, "junta size");
  distance_cmd->add_option("--set", distance_set, "comma-separated 1-based variables for dist(f, J_S)");
  add_common(distance_cmd);

  // lift
  auto* lift_cmd = app.add_subcommand("lift", "XOR lift of a truth table");
  std::string lift_fn, lift_table;
  int lift_b = 1;
  lift_cmd->add_option("--fn", lift_fn, "truth-table file")->required();
  lift_cmd->add_option("--b", lift_b, "block size b")->required();
  lift_cmd->add_option("--table", lift_table, "write the lifted table here");
  add_common(lift_cmd);

  // coloring
  auto* coloring_cmd = app.add_subcommand("coloring", "greedy radial coloring of {0,1}^ell");
  int coloring_ell = 0, coloring_d = 0;
  std::string coloring_table;
  coloring_cmd->add_option("--ell", coloring_ell, "ell <= 14")->required();
  coloring_cmd->add_option("--d", coloring_d, "radius d")->required();
  coloring_cmd->add_option("--table", coloring_table, "write the coloring file here");
  add_common(coloring_cmd);

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run one named lemma check");
  std::string verify_lemma;
  std::map<std::string, std::string> verify_args;
  verify_cmd->add_option("--lemma", verify_lemma, kLemmaIds)->required();
  for (const char* key : {"n", "trials", "t-max", "ell", "d"})
    verify_cmd->add_option(std::string("--") + key, verify_args[key], "check-specific size");
  verify_cmd->add_option("--csv", common.csv, "also write instances as CSV");
  add_common(verify_cmd);

  // suite
  auto* suite_cmd = app.add_subcommand("suite", "run the fast or full check suite");
  std::string suite_name;
  suite_cmd->add_option("--name", suite_name, "fast or full")->required();
  suite_cmd->add_option("--csv", common.csv, "also write instances as CSV");
  add_common(suite_cmd);

  // separation
  auto* separation_cmd = app.add_subcommand("separation", "exact-distance separation of D_YES and D_NO");
  InstanceFlags separation_flags;
  separation_flags.attach(separation_cmd);
  std::uint64_t separation_samples = 500;
  separation_cmd->add_option("--samples", separation_samples, "samples per distribution");
  add_common(separation_cmd);

  // advantage
  auto* advantage_cmd = app.add_subcommand("advantage", "distinguishing advantage of a strategy");
  InstanceFlags advantage_flags;
  advantage_flags.attach(advantage_cmd);
  std::string strategy_name, threshold_text, threshold_rule = "calibrated", ball_eps = "1/4";
  std::uint64_t trials = 0, queries = 2, calibration = 200;
  std::optional<std::uint64_t> ball_m;
  std::optional<int> ball_radius;
  advantage_cmd->add_option("--strategy", strategy_name, "threshold, ball or random")->required();
  advantage_cmd->add_option("--trials", trials, "trials per distribution")->required();
  advantage_cmd->add_option("--threshold", threshold_text, "threshold strategy: explicit cut-off");
  advantage_cmd->add_option("--threshold-rule", threshold_rule, "threshold strategy: calibrated or theory");
  advantage_cmd->add_option("--calibration", calibration, "threshold strategy: calibration samples");
  advantage_cmd->add_option("--queries", queries, "random strategy: query budget Q");
  advantage_cmd->add_option("--eps", ball_eps, "ball strategy: eps");
  advantage_cmd->add_option("--m", ball_m, "ball strategy: sample count override");
  advantage_cmd->add_option("--radius", ball_radius, "ball strategy: radius override");
  add_common(advantage_cmd);

  // balltester
  auto* ball_cmd = app.add_subcommand("balltester", "run the ball-sampling tester on a truth table");
  std::string ball_fn, ball_eps_text;
  int ball_k = 0;
  std::optional<std::uint64_t> bt_m;
  std::optional<int> bt_radius;
  ball_cmd->add_option("--fn", ball_fn, "truth-table file")->required();
  ball_cmd->add_option("--k", ball_k, "junta size")->required();
  ball_cmd->add_option("--eps", ball_eps_text, "eps")->required();
  ball_cmd->add_option("--m", bt_m, "sample count override");
  ball_cmd->add_option("--radius", bt_radius, "radius override");
  add_common(ball_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  const Seed seed{common.seed};

  try {
    if (*delta_cmd) {
      if (delta_t == 0) throw UsageError("--t must be at least 1");
      json rep = {{"t", delta_t}};
      if (delta_t <= kDeltaExactMax) rep["delta"] = rat(delta(delta_t));
      const auto approx = delta_float(delta_t);
      rep["float"] = {{"value", approx.value}, {"error_bound", approx.error_bound}};
      return emit(common, rep, "delta", elapsed());
    }

    if (*params_cmd) {
      const Rational eps1 = parse_rational(eps1_text), eps2 = parse_rational(eps2_text);
      json rep = {{"mode", params_mode}, {"k", params_k}, {"eps1", rat(eps1)}, {"eps2", rat(eps2)}};
      if (params_mode == "relaxed") {
        if (gamma_text.empty()) throw UsageError("relaxed mode needs --gamma");
        const auto spec = derive_relaxed_reduction(params_k, parse_rational(gamma_text), eps1, eps2);
        rep["gamma"] = rat(spec.gamma);
        rep["ell"] = spec.ell;
        rep["k_prime"] = spec.k_prime;
        rep["b"] = spec.b;
        rep["inequality"] = {{"lhs", spec.inequality_lhs}, {"rhs", rat(spec.inequality_rhs)},
                             {"holds", spec.inequality_holds}};
        return emit(common, rep, "params", elapsed());
      }
      ParamDerivation d;
      if (params_mode == "tolerant")
        d = derive_params_tolerant(static_cast<int>(params_k), eps1, eps2);
      else if (params_mode == "weak-gap")
        d = derive_params_weak_gap(static_cast<int>(params_k), eps1, eps2);
      else
        throw UsageError("unknown --mode '" + params_mode + "'");
      rep["params"] = params_json(d.params);
      rep["target"] = d.target;
      rep["table_log2"] = d.table_log2;
      rep["delta_table"] = d.delta_value;
      rep["two_pow_neg_r_at_least_eps2"] = d.r_side_condition;
      if (!record_path.empty()) save_text(record_path, params_record(d.params));
      return emit(common, rep, "params", elapsed());
    }

    if (*sample_cmd) {
      const auto hp = sample_flags.params();
      json rep = {{"params", params_json(hp)}, {"dist", sample_dist}};
      TruthTable f = TruthTable::constant(1, false);
      if (sample_dist == "no") {
        f = sample_no(hp, seed);
      } else if (sample_dist == "yes") {
        std::optional<Coloring> chi;
        if (hp.variant == Variant::Colored) chi = greedy_radial_coloring(hp.ell, hp.d);
        auto y = sample_yes(hp, chi ? &*chi : nullptr, seed);
        rep["J"] = varset_json(y.J);
        f = std::move(y.f);
      } else {
        throw UsageError("--dist must be yes or no");
      }
      rep["arity"] = f.arity();
      rep["ones"] = f.count_ones();
      if (!sample_table.empty()) save_text(sample_table, truth_table_text(f));
      return emit(common, rep, "sample", elapsed());
    }

    if (*distance_cmd) {
      const TruthTable f = load_table(distance_fn);
      json rep = {{"fn", distance_fn}, {"arity", f.arity()}, {"dist_to_constants", rat(dist_to_constants(f))}};
      if (distance_k >= 0) {
        const auto d = dist_to_k_juntas(f, distance_k);
        rep["k"] = distance_k;
        rep["dist_to_k_juntas"] = rat(d.distance);
        if (d.witness) rep["witness"] = varset_json(*d.witness);
      }
      if (!distance_set.empty()) {
        const VarSet s = parse_varset(distance_set);
        rep["set"] = varset_json(s);
        rep["dist_to_junta_on_set"] = rat(dist_to_junta_on(f, s));
      }
      return emit(common, rep, "distance", elapsed());
    }

    if (*lift_cmd) {
      const TruthTable f = load_table(lift_fn);
      const TruthTable F = xor_lift(f, lift_b);
      if (!lift_table.empty()) save_text(lift_table, truth_table_text(F));
      return emit(common, {{"fn", lift_fn}, {"b", lift_b}, {"arity", F.arity()}, {"ones", F.count_ones()}}, "lift",
                  elapsed());
    }

    if (*coloring_cmd) {
      const Coloring chi = greedy_radial_coloring(coloring_ell, coloring_d);
      if (!coloring_table.empty()) {
        std::ostringstream os;
        write_coloring(os, chi);
        save_text(coloring_table, os.str());
      }
      const bool valid = chi.valid();
      json rep = {{"ell", coloring_ell}, {"d", coloring_d}, {"num_colors", chi.num_colors},
                  {"ball_volume", ball_volume(coloring_ell, coloring_d).get_str()}, {"valid", valid}};
      return emit(common, rep, "coloring", elapsed(), valid);
    }

    if (*verify_cmd) {
      const auto rep = run_lemma(verify_lemma, verify_args, seed);
      if (!common.csv.empty()) write_lemma_csv(common.csv, {rep});
      return emit(common, lemma_json(rep), "verify", elapsed(), rep.ok());
    }

    if (*suite_cmd) {
      if (suite_name != "fast" && suite_name != "full") throw UsageError("--name must be fast or full");
      const auto reports = run_suite(suite_name, seed);
      if (!common.csv.empty()) write_lemma_csv(common.csv, reports);
      json lemmas = json::array(), timing = json::object();
      std::size_t passed = 0;
      for (const auto& r : reports) {
        lemmas.push_back(lemma_json(r));
        timing[r.lemma_id] = r.seconds;
        passed += r.ok();
      }
      const bool ok = passed == reports.size();
      json doc = {{"suite", suite_name},
                  {"lemmas", std::move(lemmas)},
                  {"summary", {{"passed", passed}, {"failed", reports.size() - passed}, {"ok", ok}}}};
      json out;
      out["command"] = "suite";
      out["seed"] = common.seed;
      for (auto& [k, v] : doc.items()) out[k] = std::move(v);
      out["timing"] = {{"seconds", elapsed()}, {"per_lemma", timing}};
      const std::string text = out.dump(2) + "\n";
      if (common.out.empty())
        std::cout << text;
      else
        save_text(common.out, text);
      return ok ? kExitOk : kExitVerificationFailed;
    }

    if (*separation_cmd) {
      const auto hp = separation_flags.params();
      const auto s = separation_experiment(hp, separation_samples, seed);
      json rep = {{"params", params_json(hp)},
                  {"samples", s.samples},
                  {"mean_no", s.mean_no},
                  {"mean_yes", s.mean_yes},
                  {"sd_no", s.sd_no},
                  {"sd_yes", s.sd_yes},
                  {"z_score", s.z_score},
                  {"mean_no_complement", s.mean_no_complement},
                  {"mean_yes_complement", s.mean_yes_complement},
                  {"complement_half_gap", s.complement_gap_required}};
      return emit(common, rep, "separation", elapsed());
    }

    if (*advantage_cmd) {
      const auto hp = advantage_flags.params();
      StrategyOptions opt;
      if (!threshold_text.empty()) opt.threshold = parse_rational(threshold_text);
      opt.threshold_rule = parse_threshold_rule(threshold_rule);
      opt.calibration_samples = calibration;
      opt.random_budget = queries;
      opt.ball_eps = parse_rational(ball_eps);
      opt.ball_m = ball_m;
      opt.ball_radius = ball_radius;
      const Strategy strategy = parse_strategy(strategy_name);
      const auto a = estimate_advantage(strategy, hp, trials, seed, opt);
      json rep = {{"strategy", to_string(strategy)},
                  {"params", params_json(hp)},
                  {"trials", a.trials},
                  {"p_accept_yes", rat(a.p_accept_yes)},
                  {"p_accept_no", rat(a.p_accept_no)},
                  {"advantage", rat(a.p_accept_yes - a.p_accept_no)},
                  {"stderr", {{"yes", a.stderr_yes}, {"no", a.stderr_no}, {"advantage", a.stderr_advantage}}},
                  {"queries_used",
                   {{"yes", {{"mean", a.queries_yes.mean}, {"max", a.queries_yes.max}}},
                    {"no", {{"mean", a.queries_no.mean}, {"max", a.queries_no.max}}}}}};
      if (a.threshold) {
        rep["threshold"] = rat(*a.threshold);
        rep["threshold_rule"] = a.threshold_rule ? to_string(*a.threshold_rule) : "explicit";
        if (a.threshold_rule == ThresholdRule::Calibrated) rep["calibration_samples"] = calibration;
      }
      if (strategy == Strategy::Random) rep["query_budget"] = queries;
      if (a.ball)
        rep["ball"] = {{"eps", rat(a.ball->eps)}, {"m", a.ball->m}, {"r_ball", a.ball->r_ball},
                       {"m_overridden", a.ball->m_overridden}, {"r_overridden", a.ball->r_overridden},
                       {"hypothesis_holds", a.ball->hypothesis_holds}};
      return emit(common, rep, "advantage", elapsed());
    }

    if (*ball_cmd) {
      const TruthTable f = load_table(ball_fn);
      const auto bp = BallTesterParams::make(f.arity(), ball_k, parse_rational(ball_eps_text), bt_m, bt_radius);
      QueryOracle oracle(f);
      const auto res = ball_tester(oracle, bp, seed);
      json rep = {{"fn", ball_fn},
                  {"n", bp.n},
                  {"k", bp.k},
                  {"eps", rat(bp.eps)},
                  {"m", bp.m},
                  {"r_ball", bp.r_ball},
                  {"m_overridden", bp.m_overridden},
                  {"r_overridden", bp.r_overridden},
                  {"hypothesis_holds", bp.hypothesis_holds},
                  {"decision", res.accept ? "accept" : "reject"},
                  {"best_set", varset_json(res.best_set)},
                  {"best_count", res.best_count},
                  {"min_count_to_accept", res.min_count_to_accept},
                  {"queries", res.queries}};
      return emit(common, rep, "balltester", elapsed());
    }
  } catch (const std::exception& e) {
    std::cerr << "junta-lab: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
