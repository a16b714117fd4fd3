#pragma once

// Query-bounded access to Boolean functions, the ball-sampling distinguisher,
// the sample estimator of distance to constants, the pair-collision
// probability, and Monte Carlo distinguishing experiments.

#include "junta/boolfn.hpp"
#include "junta/constructions.hpp"
#include "junta/delta.hpp"
#include "junta/parallel.hpp"
#include "junta/rational.hpp"
#include "junta/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace junta {

class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Answers point queries against a target function, recording a transcript of
/// distinct queries. A repeated point is answered from the transcript and not
/// charged again.
class QueryOracle {
 public:
  using Answerer = std::function<bool(std::uint64_t)>;

  explicit QueryOracle(const TruthTable& f, std::optional<std::uint64_t> budget = std::nullopt)
      : arity_(f.arity()), answer_([&f](std::uint64_t x) { return f[x]; }), budget_(budget) {}
  // The table is held by reference and must outlive the oracle.
  QueryOracle(TruthTable&&, std::optional<std::uint64_t> = std::nullopt) = delete;

  QueryOracle(int arity, Answerer answer, std::optional<std::uint64_t> budget = std::nullopt)
      : arity_(arity), answer_(std::move(answer)), budget_(budget) {
    if (arity < 1 || arity > kIndexBits) throw std::out_of_range("QueryOracle: arity out of range");
  }

  bool query(std::uint64_t x) {
    if (x > low_mask(arity_)) throw std::out_of_range("QueryOracle: point outside {0,1}^n");
    if (auto it = seen_.find(x); it != seen_.end()) return transcript_[it->second].second;
    if (budget_ && transcript_.size() >= *budget_)
      throw BudgetExhausted("query budget of " + std::to_string(*budget_) + " exhausted");
    const bool y = answer_(x);
    seen_.emplace(x, transcript_.size());
    transcript_.emplace_back(x, y);
    return y;
  }

  int arity() const { return arity_; }
  std::optional<std::uint64_t> budget() const { return budget_; }
  std::uint64_t queries_used() const { return transcript_.size(); }
  const std::vector<std::pair<std::uint64_t, bool>>& transcript() const { return transcript_; }

 private:
  int arity_;
  Answerer answer_;
  std::optional<std::uint64_t> budget_;
  std::vector<std::pair<std::uint64_t, bool>> transcript_;
  std::unordered_map<std::uint64_t, std::size_t> seen_;
};

// ---------------------------------------------------------------------------
// Ball tester

struct BallTesterParams {
  int n = 0;
  int k = 0;
  Rational eps;
  std::uint64_t m = 0;
  int r_ball = 0;
  bool m_overridden = false;
  bool r_overridden = false;
  /// eps >= 1000 * 2^{-(n-k)/10}; reported, not enforced.
  bool hypothesis_holds = false;

  /// Defaults m = ceil(1024 n^2 / eps^2) and r = ceil(log2(8/eps^2) + log2 log2(32/eps)).
  static BallTesterParams make(int n, int k, const Rational& eps, std::optional<std::uint64_t> m = std::nullopt,
                               std::optional<int> r_ball = std::nullopt) {
    if (n < 1 || n > kIndexBits) throw std::out_of_range("BallTesterParams: n out of range");
    if (k < 0 || k > n) throw std::out_of_range("BallTesterParams: k out of range");
    if (eps <= 0 || eps > Rational(1, 2)) throw std::invalid_argument("BallTesterParams: eps must lie in (0, 1/2]");
    BallTesterParams bp;
    bp.n = n;
    bp.k = k;
    bp.eps = eps;
    const double e = to_double(eps);
    if (m) {
      bp.m = *m;
      bp.m_overridden = true;
    } else {
      const Rational exact = Rational(1024 * n * n) / (eps * eps);
      Integer c;
      mpz_cdiv_q(c.get_mpz_t(), exact.get_num_mpz_t(), exact.get_den_mpz_t());
      if (!c.fits_ulong_p()) throw std::overflow_error("BallTesterParams: default m too large");
      bp.m = c.get_ui();
    }
    if (r_ball) {
      bp.r_ball = *r_ball;
      bp.r_overridden = true;
    } else {
      bp.r_ball = static_cast<int>(std::ceil(std::log2(8.0 / (e * e)) + std::log2(std::log2(32.0 / e))));
    }
    if (bp.m < 1) throw std::invalid_argument("BallTesterParams: m must be positive");
    if (bp.r_ball < 0 || bp.r_ball > n - k)
      throw std::invalid_argument("BallTesterParams: ball radius " + std::to_string(bp.r_ball) +
                                  " must lie in [0, n-k]");
    bp.hypothesis_holds = e >= 1000.0 * std::exp2(-static_cast<double>(n - k) / 10.0);
    return bp;
  }
};

/// e_S(x) = |Σ_{z in B(x,r), z_S = x_S} (2f(z) - 1)| / |B_{n-k}(r)|.
inline Rational ball_bias_statistic(QueryOracle& oracle, std::uint64_t x, const VarSet& s, int r_ball) {
  const int n = oracle.arity();
  s.check_within(n);
  const int free = n - static_cast<int>(s.size());
  if (r_ball < 0 || r_ball > free) throw std::out_of_range("ball_bias_statistic: need 0 <= r_ball <= n - |S|");
  const std::uint64_t smask = s.mask();
  long sum = oracle.query(x) ? 1 : -1;
  for (auto off : ball_offsets(free, r_ball)) {
    const std::uint64_t z = x ^ deposit_bits(off, low_mask(n) & ~smask);
    sum += oracle.query(z) ? 1 : -1;
  }
  return ratio(Integer(std::labs(sum)), ball_volume(free, r_ball));
}

struct BallTesterResult {
  bool accept = false;
  std::uint64_t best_count = 0;  // max over S of #{i : e_S(x_i) > eps/2}
  VarSet best_set;
  std::uint64_t min_count_to_accept = 0;
  std::uint64_t queries = 0;
};

inline constexpr std::uint64_t kSubsetScanCap = 5'000'000;

/// Runs the tester on explicit sample points (with repetition allowed).
inline BallTesterResult ball_tester_on_points(QueryOracle& oracle, const BallTesterParams& bp,
                                              const std::vector<std::uint64_t>& points) {
  const int n = bp.n;
  if (oracle.arity() != n) throw std::invalid_argument("ball_tester: oracle arity differs from params");
  if (binomial(static_cast<unsigned long>(n), static_cast<unsigned long>(bp.k)) > kSubsetScanCap)
    throw std::length_error("ball_tester: subset scan over C(n, k) sets is infeasible");

  // Every offset of weight <= r in n bits; each S keeps those avoiding S.
  std::vector<std::uint64_t> offsets{0};
  for (auto off : ball_offsets(n, bp.r_ball)) offsets.push_back(off);
  std::vector<std::vector<std::int8_t>> signs(points.size(), std::vector<std::int8_t>(offsets.size()));
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t o = 0; o < offsets.size(); ++o) signs[i][o] = oracle.query(points[i] ^ offsets[o]) ? 1 : -1;

  // e_S > eps/2  <=>  |sum| >= floor(eps |B| / 2) + 1
  const Integer volume = ball_volume(n - bp.k, bp.r_ball);
  const Rational half_eps_volume = bp.eps * Rational(volume) / 2;
  const long min_abs_sum = floor_of(half_eps_volume) + 1;
  // fraction >= eps^2/8  <=>  count >= ceil(eps^2 m / 8)
  const Rational need = bp.eps * bp.eps * Rational(static_cast<unsigned long>(bp.m)) / 8;
  Integer need_count;
  mpz_cdiv_q(need_count.get_mpz_t(), need.get_num_mpz_t(), need.get_den_mpz_t());

  BallTesterResult result;
  result.min_count_to_accept = need_count.get_ui();
  std::vector<std::size_t> usable;
  for_each_k_subset(1, n, bp.k, [&](const std::vector<int>& idx) {
    const VarSet s(idx);
    const std::uint64_t smask = s.mask();
    usable.clear();
    for (std::size_t o = 0; o < offsets.size(); ++o)
      if ((offsets[o] & smask) == 0) usable.push_back(o);
    std::uint64_t count = 0;
    for (const auto& row : signs) {
      long sum = 0;
      for (auto o : usable) sum += row[o];
      if (std::labs(sum) >= min_abs_sum) ++count;
    }
    if (count > result.best_count || result.best_set.empty()) {
      if (count > result.best_count || (result.best_set.empty() && result.best_count == 0)) {
        result.best_count = count;
        result.best_set = s;
      }
    }
  });
  result.accept = result.best_count >= result.min_count_to_accept;
  result.queries = oracle.queries_used();
  return result;
}

inline std::vector<std::uint64_t> sample_points(Seed seed, int n, std::uint64_t m) {
  RngStream rng(seed, Stream::kTesterPoints);
  std::vector<std::uint64_t> pts(m);
  for (auto& p : pts) p = rng.below(std::uint64_t{1} << n);
  return pts;
}

/// Samples m uniform points and accepts iff some size-k set S sees a biased
/// ball around at least an eps^2/8 fraction of them.
inline BallTesterResult ball_tester(QueryOracle& oracle, const BallTesterParams& bp, Seed seed) {
  return ball_tester_on_points(oracle, bp, sample_points(seed, bp.n, bp.m));
}

// ---------------------------------------------------------------------------
// Estimators and collision probabilities

/// 1/2 - |Σ (2 f(x_i) - 1)| / (2m) over m uniform samples.
inline Rational sample_estimate_dist_to_constant(const TruthTable& f, std::uint64_t m, Seed seed) {
  if (m < 1) throw std::invalid_argument("sample_estimate_dist_to_constant: m must be positive");
  RngStream rng(seed, Stream::kPointSample);
  long sum = 0;
  for (std::uint64_t i = 0; i < m; ++i) sum += f[rng.below(f.size())] ? 1 : -1;
  return Rational(1, 2) - ratio(static_cast<std::uint64_t>(std::labs(sum)), 2 * m);
}

/// Exact Pr over uniform J ⊆ {r+1, ..., n}, |J| = ell, n = k + ell, that two
/// points satisfy x = y^{⊕J}. Such a pair pins J to their difference, so the
/// colliding sets are exactly the distinct admissible differences.
inline Rational pair_collision_prob(const std::vector<std::uint64_t>& points, int k, int r, int ell) {
  const int n = k + ell;
  if (k < 1 || r < 0 || ell < 0 || n > kIndexBits) throw std::invalid_argument("pair_collision_prob: bad parameters");
  if (ell > n - r) throw std::invalid_argument("pair_collision_prob: ell exceeds n - r");
  for (auto x : points)
    if (x > low_mask(n)) throw std::out_of_range("pair_collision_prob: point outside {0,1}^(k+ell)");
  const std::uint64_t rmask = low_mask(r);
  std::set<std::uint64_t> colliding;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const std::uint64_t diff = points[i] ^ points[j];
      if ((diff & rmask) == 0 && std::popcount(diff) == ell && ell > 0) colliding.insert(diff);
    }
  return ratio(Integer(static_cast<unsigned long>(colliding.size())),
               binomial(static_cast<unsigned long>(n - r), static_cast<unsigned long>(ell)));
}

/// Q^2 / C(k-r, ell); nullopt when C(k-r, ell) = 0.
inline std::optional<Rational> collision_union_bound(std::uint64_t q, int k, int r, int ell) {
  const Integer c = k - r >= ell && k - r >= 0
                        ? binomial(static_cast<unsigned long>(k - r), static_cast<unsigned long>(ell))
                        : Integer(0);
  if (c == 0) return std::nullopt;
  return ratio(Integer(static_cast<unsigned long>(q)) * Integer(static_cast<unsigned long>(q)), c);
}

// ---------------------------------------------------------------------------
// Distinguishing experiments

enum class Strategy { Threshold, Ball, Random };

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Threshold: return "threshold";
    case Strategy::Ball: return "ball";
    case Strategy::Random: return "random";
  }
  return "?";
}

inline Strategy parse_strategy(const std::string& s) {
  if (s == "threshold") return Strategy::Threshold;
  if (s == "ball") return Strategy::Ball;
  if (s == "random") return Strategy::Random;
  throw std::invalid_argument("unknown strategy '" + s + "' (expected threshold, ball or random)");
}

enum class ThresholdRule { Calibrated, Theory };

inline std::string to_string(ThresholdRule r) { return r == ThresholdRule::Calibrated ? "calibrated" : "theory"; }

inline ThresholdRule parse_threshold_rule(const std::string& s) {
  if (s == "calibrated") return ThresholdRule::Calibrated;
  if (s == "theory") return ThresholdRule::Theory;
  throw std::invalid_argument("unknown threshold rule '" + s + "' (expected calibrated or theory)");
}

struct StrategyOptions {
  std::optional<Rational> threshold;  // Threshold: accept iff dist(f, J_k) <= threshold
  ThresholdRule threshold_rule = ThresholdRule::Calibrated;
  std::uint64_t calibration_samples = 200;
  Rational ball_eps = Rational(1, 4);
  std::optional<std::uint64_t> ball_m;
  std::optional<int> ball_radius;
  std::uint64_t random_budget = 2;  // Random: number of distinct queries
};

/// Midpoint of the two expected distances the construction separates:
/// D_NO near p(1-2^-r) + Δ_{2^ell} 2^-r, D_YES near the same minus 2^{-2 ell} 2^-r.
inline Rational theory_threshold(const HardInstanceParams& hp) {
  if (hp.ell > 12) throw std::out_of_range("default_threshold: exact Δ needs ell <= 12");
  const Rational scale = pow2_inv(static_cast<unsigned long>(hp.r));
  const Rational no_level = hp.p * (Rational(1) - scale) + delta(std::uint64_t{1} << hp.ell) * scale;
  return no_level - pow2_inv(static_cast<unsigned long>(2 * hp.ell + 1)) * scale;
}

struct QueryStats {
  double mean = 0;
  std::uint64_t max = 0;
};

struct AdvantageReport {
  Strategy strategy = Strategy::Threshold;
  std::uint64_t trials = 0;
  Rational p_accept_yes;
  Rational p_accept_no;
  double stderr_yes = 0;
  double stderr_no = 0;
  double stderr_advantage = 0;
  QueryStats queries_yes;
  QueryStats queries_no;
  std::optional<Rational> threshold;
  std::optional<ThresholdRule> threshold_rule;  // unset when the threshold was given explicitly
  std::optional<BallTesterParams> ball;
};

namespace detail {

struct TrialOutcome {
  bool accept = false;
  std::uint64_t queries = 0;
};

inline TrialOutcome run_strategy(Strategy strategy, const StrategyOptions& opt, const HardInstanceParams& hp,
                                 const TruthTable& f, const Rational& threshold,
                                 const std::optional<BallTesterParams>& ball, Seed seed) {
  switch (strategy) {
    case Strategy::Threshold: {
      const auto report = dist_to_k_juntas(f, hp.k);
      return {report.distance <= threshold, f.size()};
    }
    case Strategy::Ball: {
      QueryOracle oracle(f);
      const auto res = ball_tester(oracle, *ball, seed);
      return {res.accept, res.queries};
    }
    case Strategy::Random: {
      QueryOracle oracle(f, opt.random_budget);
      RngStream rng(seed, Stream::kTesterPoints);
      bool parity = false;
      while (oracle.queries_used() < opt.random_budget && oracle.queries_used() < f.size())
        parity ^= oracle.query(rng.below(f.size()));
      return {parity, oracle.queries_used()};
    }
  }
  throw std::invalid_argument("unknown strategy");
}

inline QueryStats summarize(const std::vector<TrialOutcome>& v) {
  QueryStats s;
  double total = 0;
  for (const auto& o : v) {
    total += static_cast<double>(o.queries);
    s.max = std::max(s.max, o.queries);
  }
  s.mean = v.empty() ? 0 : total / static_cast<double>(v.size());
  return s;
}

}  // namespace detail

/// Draws a D_YES sample of the variant named by the params.
inline YesSample sample_yes(const HardInstanceParams& hp, const Coloring* chi, Seed seed) {
  if (hp.variant == Variant::Parity) return sample_yes_parity(hp, seed);
  if (!chi) throw std::invalid_argument("sample_yes: colored variant needs a coloring");
  return sample_yes_colored(hp, *chi, seed);
}

/// Midpoint of the empirical mean distances to J_k over `samples` draws from
/// each distribution. Seeds are disjoint from the trial seeds of any caller
/// that passes a derived seed.
inline Rational calibrated_threshold(const HardInstanceParams& hp, std::uint64_t samples, Seed seed) {
  if (samples == 0) throw std::invalid_argument("calibrated_threshold: samples must be positive");
  std::optional<Coloring> chi;
  if (hp.variant == Variant::Colored) chi = greedy_radial_coloring(hp.ell, hp.d);
  const CounterRng yes_seeds(seed, Stream::kTrialYes), no_seeds(seed, Stream::kTrialNo);
  std::vector<Rational> yes(samples), no(samples);
  parallel_for(samples, [&](std::size_t i) {
    yes[i] = dist_to_k_juntas(sample_yes(hp, chi ? &*chi : nullptr, yes_seeds.derive(i)).f, hp.k).distance;
    no[i] = dist_to_k_juntas(sample_no(hp, no_seeds.derive(i)), hp.k).distance;
  });
  Rational total = 0;
  for (std::size_t i = 0; i < samples; ++i) total += yes[i] + no[i];
  return total / Rational(static_cast<unsigned long>(2 * samples));
}

/// Runs a strategy on `trials` fresh D_YES and D_NO samples each.
/// Random baseline: query `random_budget` distinct uniform points and accept
/// iff the XOR of the answers is 1.
inline AdvantageReport estimate_advantage(Strategy strategy, const HardInstanceParams& hp, std::uint64_t trials,
                                          Seed seed, const StrategyOptions& opt = {}) {
  if (trials == 0) throw std::invalid_argument("estimate_advantage: trials must be positive");
  hp.validate();
  AdvantageReport report;
  report.strategy = strategy;
  report.trials = trials;
  Rational threshold = 0;
  if (strategy == Strategy::Threshold) {
    if (opt.threshold)
      threshold = *opt.threshold;
    else if (opt.threshold_rule == ThresholdRule::Theory)
      threshold = theory_threshold(hp);
    else
      threshold = calibrated_threshold(hp, opt.calibration_samples, CounterRng(seed, Stream::kAux).derive(1));
    report.threshold = threshold;
    if (!opt.threshold) report.threshold_rule = opt.threshold_rule;
  }
  std::optional<BallTesterParams> ball;
  if (strategy == Strategy::Ball) {
    ball = BallTesterParams::make(hp.n(), hp.k, opt.ball_eps, opt.ball_m, opt.ball_radius);
    report.ball = ball;
  }
  std::optional<Coloring> chi;
  if (hp.variant == Variant::Colored) chi = greedy_radial_coloring(hp.ell, hp.d);

  const CounterRng yes_seeds(seed, Stream::kTrialYes);
  const CounterRng no_seeds(seed, Stream::kTrialNo);
  std::vector<detail::TrialOutcome> yes(trials), no(trials);
  parallel_for(trials, [&](std::size_t t) {
    const Seed ys = yes_seeds.derive(t), ns = no_seeds.derive(t);
    const auto sample = sample_yes(hp, chi ? &*chi : nullptr, ys);
    yes[t] = detail::run_strategy(strategy, opt, hp, sample.f, threshold, ball,
                                  CounterRng(ys, Stream::kAux).derive(0));
    const auto g = sample_no(hp, ns);
    no[t] = detail::run_strategy(strategy, opt, hp, g, threshold, ball, CounterRng(ns, Stream::kAux).derive(0));
  });

  std::uint64_t acc_yes = 0, acc_no = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    acc_yes += yes[t].accept;
    acc_no += no[t].accept;
  }
  report.p_accept_yes = ratio(acc_yes, trials);
  report.p_accept_no = ratio(acc_no, trials);
  const double py = to_double(report.p_accept_yes), pn = to_double(report.p_accept_no);
  const double nt = static_cast<double>(trials);
  report.stderr_yes = std::sqrt(py * (1 - py) / nt);
  report.stderr_no = std::sqrt(pn * (1 - pn) / nt);
  report.stderr_advantage = std::sqrt(report.stderr_yes * report.stderr_yes + report.stderr_no * report.stderr_no);
  report.queries_yes = detail::summarize(yes);
  report.queries_no = detail::summarize(no);
  return report;
}

// ---------------------------------------------------------------------------
// Distance separation between D_YES and D_NO

struct SeparationReport {
  std::uint64_t samples = 0;
  double mean_no = 0, mean_yes = 0;      // E dist(f, J_k)
  double sd_no = 0, sd_yes = 0;
  double z_score = 0;                    // (mean_no - mean_yes) / stderr of the difference
  double mean_no_complement = 0;         // E dist(f, J_{[n] \ J'}), J' drawn like J
  double mean_yes_complement = 0;        // E dist(f, J_{[n] \ J}) under D_YES
  double complement_gap_required = 0;    // 2^{-2 ell} 2^{-r} / 2
};

/// Exact dist(f, J_k) and dist(f, J_{[n]\J}) for `samples` draws from each distribution.
inline SeparationReport separation_experiment(const HardInstanceParams& hp, std::uint64_t samples, Seed seed) {
  if (samples < 2) throw std::invalid_argument("separation_experiment: need at least two samples");
  hp.validate();
  std::optional<Coloring> chi;
  if (hp.variant == Variant::Colored) chi = greedy_radial_coloring(hp.ell, hp.d);
  struct Row {
    double no = 0, yes = 0, no_comp = 0, yes_comp = 0;
  };
  std::vector<Row> rows(samples);
  const CounterRng yes_seeds(seed, Stream::kTrialYes);
  const CounterRng no_seeds(seed, Stream::kTrialNo);
  const VarSet everything = VarSet::range(1, hp.n());
  auto complement = [&](const VarSet& J) { return VarSet::from_mask(everything.mask() & ~J.mask()); };
  parallel_for(samples, [&](std::size_t i) {
    const auto yes = sample_yes(hp, chi ? &*chi : nullptr, yes_seeds.derive(i));
    const Seed ns = no_seeds.derive(i);
    const auto no = sample_no(hp, ns);
    const VarSet other_J = choose_subset(ns, hp.r + 1, hp.n(), hp.ell);
    rows[i].yes = to_double(dist_to_k_juntas(yes.f, hp.k).distance);
    rows[i].no = to_double(dist_to_k_juntas(no, hp.k).distance);
    rows[i].yes_comp = to_double(dist_to_junta_on(yes.f, complement(yes.J)));
    rows[i].no_comp = to_double(dist_to_junta_on(no, complement(other_J)));
  });
  SeparationReport rep;
  rep.samples = samples;
  const double ns = static_cast<double>(samples);
  for (const auto& r : rows) {
    rep.mean_no += r.no / ns;
    rep.mean_yes += r.yes / ns;
    rep.mean_no_complement += r.no_comp / ns;
    rep.mean_yes_complement += r.yes_comp / ns;
  }
  for (const auto& r : rows) {
    rep.sd_no += (r.no - rep.mean_no) * (r.no - rep.mean_no);
    rep.sd_yes += (r.yes - rep.mean_yes) * (r.yes - rep.mean_yes);
  }
  rep.sd_no = std::sqrt(rep.sd_no / (ns - 1));
  rep.sd_yes = std::sqrt(rep.sd_yes / (ns - 1));
  const double se = std::sqrt((rep.sd_no * rep.sd_no + rep.sd_yes * rep.sd_yes) / ns);
  rep.z_score = se > 0 ? (rep.mean_no - rep.mean_yes) / se : 0;
  rep.complement_gap_required = std::ldexp(1.0, -2 * hp.ell - hp.r) / 2;
  return rep;
}

/// f(x) = x_coordinate XOR Bernoulli(noise), independently per point.
inline TruthTable noisy_dictator(int n, int coordinate, const Rational& noise, Seed seed) {
  const CounterRng rng(seed, Stream::kNoise);
  const std::uint64_t threshold = bernoulli_threshold(noise);
  const TruthTable base = dictator(n, coordinate);
  return TruthTable::tabulate(n, [&](std::uint64_t x) { return base[x] != (rng.word(x) < threshold); });
}

}  // namespace junta
