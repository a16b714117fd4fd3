// Runs the eleven acceptance criteria and prints one PASS/FAIL line each.
#include "junta/lemmas.hpp"

#include <cstdio>
#include <functional>
#include <string>

using namespace junta;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string first_failure(const LemmaReport& rep) {
  for (const auto& inst : rep.instances)
    if (!inst.verdict) {
      std::string s = inst.lhs + " " + inst.relation + " " + inst.rhs + " fails at";
      for (const auto& [k, v] : inst.inputs) s += " " + k + "=" + v;
      if (inst.counterexample) s += " (" + *inst.counterexample + ")";
      return s;
    }
  return {};
}

Outcome from_report(const LemmaReport& rep) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu/%zu instances hold, %.2fs", rep.passed(), rep.instances.size(), rep.seconds);
  std::string detail = buf;
  if (!rep.ok()) detail += "; " + first_failure(rep);
  return {rep.ok(), detail};
}

Outcome require(const LemmaReport& rep, double max_seconds) {
  Outcome out = from_report(rep);
  if (rep.seconds > max_seconds) {
    out.pass = false;
    out.detail += "; over the time limit";
  }
  return out;
}

}  // namespace

int main() {
  const Seed seed{20240901};
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"delta exactness and properties", [] { return require(check_delta_properties(4096), 60); }},
      {"k-wise distance gap",
       [] {
         auto rep = check_k_wise_distance({4, 8, 12, 16, 20});
         const auto [uniform, odd] = parity_gap(4);
         detail::add_exact(rep, {{"n", "4"}, {"check", "equality"}}, uniform - odd, "=", Rational(1, 4));
         return require(rep, 1);
       }},
      {"indistinguishability",
       [&] {
         auto parity = check_indistinguishability(Variant::Parity, seed);
         const auto colored = check_indistinguishability(Variant::Colored, seed);
         parity.instances.insert(parity.instances.end(), colored.instances.begin(), colored.instances.end());
         parity.seconds += colored.seconds;
         return from_report(parity);
       }},
      {"distance separation", [&] { return require(check_distance_separation(separation_params(), seed, 500), 600); }},
      {"lifting", [&] { return require(check_lifting(seed, 200, 3, 2), 60); }},
      {"radial coloring", [] { return require(check_radial_coloring(12, 3), 60); }},
      {"ball tester", [&] { return require(check_ball_tester(seed), 600); }},
      {"bucket expectation", [&] { return from_report(check_bucket_expectation(seed, 1000, 12)); }},
      {"collision bound", [&] { return from_report(check_collision_bound(seed, 500, 20, 12, 2, 3)); }},
      {"estimator concentration", [&] { return from_report(check_estimator_concentration(seed, 200, 12)); }},
      {"parameter derivation", [] { return from_report(check_parameter_derivation()); }},
  };

  int failures = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome out{false, {}};
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failures += !out.pass;
    std::printf("%s %2d %s: %s\n", out.pass ? "PASS" : "FAIL", index, name, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
