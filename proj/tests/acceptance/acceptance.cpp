// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// LSIEVE_ACCEPTANCE_FULL=1 extends the Lemma sweep to x = 10^6.
// LSIEVE_ACCEPTANCE_ONLY=3,5 runs a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "lsieve/characters.hpp"
#include "lsieve/cli.hpp"
#include "lsieve/euler_sums.hpp"
#include "lsieve/lemma_sweep.hpp"
#include "lsieve/number_core.hpp"
#include "lsieve/random.hpp"
#include "lsieve/sieve_inequality.hpp"

using namespace lsieve;
using cd = std::complex<double>;

namespace {

// Pinned tolerances.
constexpr double kOrthogonalityTol = 1e-9;
constexpr double kDualityMaxTol = 1e-6;
constexpr double kPullbackTol = 1e-8;
constexpr double kLambdaAgreeTol = 1e-8;
constexpr double kRandomQuotientSlack = 1e-9;
constexpr double kExpansionTol = 1e-12;
constexpr double kBoundSlack = 1e-12;
constexpr double kAbelTol = 1e-6;

constexpr std::uint64_t kSeedDuality = 20'001;
constexpr std::uint64_t kSeedExpansion = 30'001;
constexpr std::uint64_t kSeedTheorem = 40'001;
constexpr std::uint64_t kSeedSynthetic = 50'001;
constexpr std::uint64_t kSeedAbel = 70'001;
constexpr std::uint64_t kSeedVariant = 80'001;

constexpr std::array<std::int64_t, 4> kModuli{5, 7, 11, 13};
constexpr std::array<std::int64_t, 3> kHeights{1'000, 10'000, 100'000};
constexpr int kDrawsPerPoint = 100;

struct Outcome {
  bool passed = true;
  std::string detail;
};

const PrimeTable& table() {
  static const PrimeTable t = sieve_primes(1'000'000);
  return t;
}

bool full_scale() {
  const char* v = std::getenv("LSIEVE_ACCEPTANCE_FULL");
  return v != nullptr && std::string(v) != "0" && !std::string(v).empty();
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

// The (D, x) grid shared by criteria 4, 5, 8 and 9, with its constant.
struct GridPoint {
  std::int64_t D = 0;
  std::int64_t x = 0;
  SumSpec spec;
  std::vector<Character> chars;
  double c1 = 0.0;
  double L = 0.0;
  // shifts and cutoffs at the first draw's witnesses
  std::vector<double> witness_t;
  std::vector<std::int64_t> witness_y;
};

std::vector<GridPoint>& grid_points() {
  static std::vector<GridPoint> points = [] {
    std::vector<GridPoint> out;
    for (std::int64_t x : kHeights) {
      for (std::int64_t D : kModuli) {
        GridPoint g;
        g.D = D;
        g.x = x;
        g.spec = SumSpec{D, x, 1.0, {}};
        g.chars = non_principal_characters(D);
        g.c1 = estimate_c1(table(), g.chars, g.spec).c1;
        g.L = sum_reciprocal_primes(D, x, table());
        out.push_back(std::move(g));
      }
    }
    return out;
  }();
  return points;
}

Outcome criterion1() {
  Outcome o;
  double worst = 0.0;
  for (std::int64_t D = 1; D <= 200; ++D) {
    const auto group = character_group(D);
    if (static_cast<std::int64_t>(group.size()) != euler_phi(D)) {
      o.passed = false;
      o.detail = "D=" + std::to_string(D) + " has " + std::to_string(group.size()) + " characters";
      return o;
    }
    worst = std::max(worst, verify_orthogonality(D).max_deviation);
  }
  o.passed = worst < kOrthogonalityTol;
  o.detail = "D<=200, max orthogonality deviation " + fmt(worst);
  return o;
}

Outcome criterion2() {
  Outcome o;
  Rng rng(kSeedDuality);
  double worst_max_gap = 0.0;
  double worst_pullback = 0.0;
  double worst_agree = 0.0;
  double worst_random_only = 0.0;
  int random_over = 0;
  for (int m = 0; m < 500; ++m) {
    const auto k = static_cast<Eigen::Index>(1 + rng.next() % 8);
    const auto n = static_cast<Eigen::Index>(1 + rng.next() % 200);
    Eigen::MatrixXcd entries(k, n);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) entries(i, j) = rng.complex_normal();
    }
    const auto r = duality_check(DeltaMatrix::synthetic(entries), 1000, rng.next());
    if (r.max_trial_quotient > r.lambda_gram * (1.0 + kRandomQuotientSlack)) ++random_over;
    const double best = std::max(r.max_trial_quotient, r.pullback_quotient);
    worst_max_gap = std::max(worst_max_gap, std::abs(best - r.lambda_gram) / r.lambda_gram);
    worst_pullback = std::max(worst_pullback, r.pullback_rel_error);
    worst_agree = std::max(worst_agree, r.lambda_rel_diff);
    worst_random_only = std::max(worst_random_only, 1.0 - r.max_trial_quotient / r.lambda_gram);
  }
  o.passed = random_over == 0 && worst_max_gap <= kDualityMaxTol && worst_pullback <= kPullbackTol &&
             worst_agree <= kLambdaAgreeTol;
  o.detail = "500 matrices x 1000 vectors; max-quotient gap " + fmt(worst_max_gap) + ", pullback error " +
             fmt(worst_pullback) + ", two-sided lambda gap " + fmt(worst_agree) + ", random above lambda " +
             std::to_string(random_over) + " (random vectors alone fall short by up to " + fmt(worst_random_only) + ")";
  return o;
}

Outcome criterion3() {
  Outcome o;
  Rng rng(kSeedExpansion);
  constexpr std::int64_t x = 10'000;
  double worst = 0.0;
  for (int config = 0; config < 100; ++config) {
    const std::int64_t D = kModuli[static_cast<std::size_t>(config) % kModuli.size()];
    const SumSpec spec{D, x, 1.0, {}};
    const auto all = non_principal_characters(D);
    std::vector<Character> chars;
    while (chars.size() < 2) {
      chars.clear();
      for (const auto& chi : all) {
        if (rng.uniform() < 0.6) chars.push_back(chi);
      }
    }
    const std::size_t k = chars.size();
    std::vector<double> t(k);
    std::vector<std::int64_t> y(k);
    for (std::size_t j = 0; j < k; ++j) {
      t[j] = rng.uniform(-spec.t_bound(), spec.t_bound());
      y[j] = D + static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(x - D + 1));
    }
    const auto delta = build_delta(table(), chars, t, y, spec);
    std::vector<double> diag(k);
    for (std::size_t j = 0; j < k; ++j) diag[j] = sum_reciprocal_primes(D, y[j], table());
    Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t l = j + 1; l < k; ++l) {
        cross(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) =
            cross_term(table(), chars[j], chars[l], t[j], t[l], std::min(y[j], y[l]), spec);
      }
    }
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXcd b(static_cast<Eigen::Index>(k));
      double expansion = 0.0;
      double scale = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const double bj = rng.normal();
        b(static_cast<Eigen::Index>(j)) = bj;
        expansion += bj * bj * diag[j];
        scale += std::abs(bj) * std::sqrt(diag[j]);
      }
      for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t l = j + 1; l < k; ++l) {
          expansion += 2.0 * b(static_cast<Eigen::Index>(j)).real() * b(static_cast<Eigen::Index>(l)).real() *
                       cross(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l));
        }
      }
      const double prime_side = (delta.dense().adjoint() * b).squaredNorm();
      worst = std::max(worst, std::abs(prime_side - expansion) / (scale * scale));
    }
  }
  o.passed = worst <= kExpansionTol;
  o.detail = "100 configurations x 100 real b; max scaled gap " + fmt(worst);
  return o;
}

// Criteria 4 and 5 share the same draws.
struct TheoremOutcome {
  Outcome c4;
  Outcome c5;
};

TheoremOutcome criteria4and5() {
  TheoremOutcome out;
  double worst_ratio = 0.0;
  double worst_split = 0.0;
  int failures = 0;
  int split_failures = 0;
  VerifyOptions options;
  options.compute_lambda = false;
  for (auto& g : grid_points()) {
    const double c = default_c_from_c1(g.c1);
    const double bound4 = 4.0 * (g.L + static_cast<double>(g.chars.size() - 1) * g.c1);
    for (int trial = 0; trial < kDrawsPerPoint; ++trial) {
      const std::uint64_t seed = kSeedTheorem + static_cast<std::uint64_t>(trial);
      const auto a = CoefficientVector::random_complex(table(), g.D, g.x, seed);
      const auto r = verify_theorem(table(), a, g.chars, g.spec, c, options);
      worst_ratio = std::max(worst_ratio, r.ratio);
      if (!r.passed || r.ratio > 1.0) ++failures;

      std::vector<double> t;
      std::vector<std::int64_t> y;
      Eigen::VectorXcd b(static_cast<Eigen::Index>(g.chars.size()));
      for (std::size_t j = 0; j < g.chars.size(); ++j) {
        const auto& w = r.witnesses[j].witness;
        t.push_back(w.t_star);
        y.push_back(std::max(w.y_star, g.D));
        b(static_cast<Eigen::Index>(j)) = char_prime_sum(table(), g.chars[j], a, g.D, y.back(), cd(1.0, w.t_star));
      }
      if (trial == 0) {
        g.witness_t = t;
        g.witness_y = y;
      }
      const auto m = gram_matrix(table(), build_delta(table(), g.chars, t, y, g.spec));
      const double q = quadratic_form(m, b) / (bound4 * b.squaredNorm());
      worst_split = std::max(worst_split, q);
      if (q > 1.0 + kBoundSlack) ++split_failures;
    }
  }
  out.c4.passed = failures == 0;
  out.c4.detail = "12 (D,x) points x 100 complex draws, c = 4 c1; max ratio " + fmt(worst_ratio) +
                  ", failures " + std::to_string(failures);

  // Two unit rows at an obtuse angle: M = [[1, -0.9], [-0.9, 1]], c1 = 0.
  Eigen::MatrixXcd rows(2, 2);
  rows << 1.0, 0.0, -0.9, std::sqrt(0.19);
  const auto m = dense_gram(DeltaMatrix::synthetic(rows));
  const double pre_split = 1.0;  // L + (k-1) max(Re M_12, 0)
  Rng rng(kSeedSynthetic);
  double worst_nonneg = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    Eigen::VectorXcd b(2);
    b << std::abs(rng.normal()), std::abs(rng.normal());
    worst_nonneg = std::max(worst_nonneg, quadratic_form(m, b) / (pre_split * b.squaredNorm()));
  }
  Eigen::VectorXcd signed_b(2);
  signed_b << 1.0, -1.0;
  const double signed_q = quadratic_form(m, signed_b) / (pre_split * signed_b.squaredNorm());
  const double signed_split = quadratic_form(m, signed_b) / (4.0 * pre_split * signed_b.squaredNorm());
  const bool fixture_ok = worst_nonneg <= 1.0 + kBoundSlack && signed_q > 1.0 && signed_split <= 1.0;

  out.c5.passed = split_failures == 0 && fixture_ok;
  out.c5.detail = "witness Gram max b*Mb / 4(L+(k-1)c1)|b|^2 = " + fmt(worst_split) +
                  "; fixture: nonnegative b max " + fmt(worst_nonneg) + ", b=(1,-1) gives " + fmt(signed_q) +
                  " before the split and " + fmt(signed_split) + " after";
  return out;
}

Outcome criterion6() {
  Outcome o;
  std::ifstream in(LSIEVE_THRESHOLDS_FIXTURE);
  if (!in) {
    o.passed = false;
    o.detail = std::string("missing fixture ") + LSIEVE_THRESHOLDS_FIXTURE;
    return o;
  }
  const auto doc = nlohmann::json::parse(in);
  std::map<std::pair<std::int64_t, std::int64_t>, double> thresholds;
  double global = 0.0;
  std::int64_t fixture_x = 0;
  for (const auto& e : doc["entries"]) {
    const double th = e["threshold"].get<double>();
    thresholds[{e["d"].get<std::int64_t>(), e["x"].get<std::int64_t>()}] = th;
    global = std::max(global, th);
    fixture_x = std::max(fixture_x, e["x"].get<std::int64_t>());
  }
  const std::int64_t max_x = full_scale() ? 1'000'000 : 100'000;
  const double b = doc["b_exponent"].get<double>();
  const auto max_d = doc["max_d"].get<std::int64_t>();
  int exceed = 0;
  int missing = 0;
  double worst_slack = -1e300;
  double largest = 0.0;
  std::size_t points = 0;
  for (std::int64_t x : sweep_x_values(max_x)) {
    for (std::int64_t d = 3; d <= max_d; ++d) {
      double threshold = global;
      if (x <= fixture_x) {
        const auto it = thresholds.find({d, x});
        if (it == thresholds.end()) {
          ++missing;
          continue;
        }
        threshold = it->second;
      }
      const auto p = lemma_sweep_max(table(), d, x, b, 1);
      ++points;
      largest = std::max(largest, p.max_value);
      worst_slack = std::max(worst_slack, p.max_value - threshold);
      if (p.max_value > threshold) ++exceed;
    }
  }
  o.passed = exceed == 0 && missing == 0;
  o.detail = std::to_string(points) + " (D,x) points up to x=" + std::to_string(max_x) + "; largest max " +
             fmt(largest) + ", closest approach to threshold " + fmt(worst_slack) + ", exceedances " +
             std::to_string(exceed) + ", missing thresholds " + std::to_string(missing);
  return o;
}

Outcome criterion7() {
  Outcome o;
  const SumSpec spec{5, 10'000, 1.0, {}};
  const auto chars = non_principal_characters(5);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = CoefficientVector::random_complex(table(), 5, spec.x, kSeedAbel + static_cast<std::uint64_t>(trial));
    for (const auto& chi : chars) worst = std::max(worst, abel_reduction_check(table(), chi, a, spec).ratio);
  }
  o.passed = worst <= 2.0 + kAbelTol;
  o.detail = "100 draws x 3 characters, D=5, x=10^4; max ratio " + fmt(worst);
  return o;
}

Outcome criterion8() {
  Outcome o;
  VerifyOptions options;
  options.compute_lambda = false;
  double worst = 0.0;
  int failures = 0;
  for (const auto& g : grid_points()) {
    const double c = default_c_from_c1(g.c1);
    for (int trial = 0; trial < kDrawsPerPoint; ++trial) {
      const auto a =
          CoefficientVector::random_real(table(), g.D, g.x, kSeedVariant + static_cast<std::uint64_t>(trial));
      const auto r = variant_re_bound(table(), a, g.chars, g.spec, c, options);
      worst = std::max(worst, r.ratio);
      if (!r.passed || r.ratio > 1.0) ++failures;
    }
  }
  o.passed = failures == 0;
  o.detail = "12 (D,x) points x 100 real draws; max ratio " + fmt(worst) + ", failures " + std::to_string(failures);
  return o;
}

Outcome criterion9() {
  Outcome o;
  const std::string path = std::string(LSIEVE_ARCHIVE_DIR) + "/extremal_ratios.csv";
  std::ofstream csv(path);
  csv << "d,x,configuration,k,L,c1,lambda_max,ratio_to_L,max_diagonal_over_L,ratio_to_real_bound\n";
  csv << std::setprecision(17);
  int violations = 0;
  double lo = 1e300;
  double hi = 0.0;
  for (const auto& g : grid_points()) {
    const std::size_t k = g.chars.size();
    std::vector<std::pair<std::string, std::pair<std::vector<double>, std::vector<std::int64_t>>>> configs;
    configs.push_back({"t0_yx", {std::vector<double>(k, 0.0), std::vector<std::int64_t>(k, g.x)}});
    if (!g.witness_t.empty()) configs.push_back({"witness", {g.witness_t, g.witness_y}});
    for (const auto& [name, ty] : configs) {
      const auto r = extremal_ratio(table(), g.chars, g.spec, ty.first, ty.second, g.c1);
      if (r.lambda_max < r.max_diagonal * (1.0 - kBoundSlack)) ++violations;
      lo = std::min(lo, r.ratio_to_L);
      hi = std::max(hi, r.ratio_to_L);
      csv << g.D << ',' << g.x << ',' << name << ',' << k << ',' << r.L << ',' << r.c1 << ',' << r.lambda_max << ','
          << r.ratio_to_L << ',' << r.max_diagonal / r.L << ',' << r.ratio_to_real_bound << '\n';
    }
  }
  o.passed = violations == 0 && static_cast<bool>(csv);
  o.detail = "lambda/L in [" + fmt(lo) + ", " + fmt(hi) + "], below diagonal " + std::to_string(violations) +
             "; archived to " + path;
  return o;
}

Outcome criterion10() {
  Outcome o;
  int mismatches = 0;
  int usage = 0;
  std::size_t runs = 0;
  for (const auto& name : subcommand_names()) {
    for (const std::string format : {"json", "csv"}) {
      const std::vector<std::string> args{"lsieve", name,  "--d",     "7",  "--x",      "3000",
                                          "--trials", "2", "--seed", "11", "--format", format};
      std::ostringstream out1, err1, out2, err2;
      const int code1 = run_cli(args, out1, err1);
      const int code2 = run_cli(args, out2, err2);
      ++runs;
      if (code1 == kExitUsage) ++usage;
      if (code1 != code2 || out1.str() != out2.str() || out1.str().empty()) ++mismatches;
    }
  }
  o.passed = mismatches == 0 && usage == 0;
  o.detail = std::to_string(runs) + " subcommand/format pairs run twice; differing " + std::to_string(mismatches) +
             ", usage errors " + std::to_string(usage);
  return o;
}

}  // namespace

int main() {
  std::set<int> only;
  if (const char* v = std::getenv("LSIEVE_ACCEPTANCE_ONLY")) {
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) only.insert(std::stoi(item));
    }
  }
  const auto wanted = [&](int n) { return only.empty() || only.contains(n); };

  int failed = 0;
  const auto report = [&](int n, const Outcome& o, double seconds) {
    std::cout << "criterion " << std::setw(2) << n << ": " << (o.passed ? "PASS" : "FAIL") << "  " << o.detail
              << "  [" << std::fixed << std::setprecision(1) << seconds << " s]" << std::defaultfloat << std::endl;
    if (!o.passed) ++failed;
  };
  const auto timed = [&](int n, const std::function<Outcome()>& f) {
    if (!wanted(n)) return;
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = f();
    report(n, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  };

  timed(1, criterion1);
  timed(2, criterion2);
  timed(3, criterion3);
  if (wanted(4) || wanted(5) || wanted(9)) {
    const auto start = std::chrono::steady_clock::now();
    const auto both = criteria4and5();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (wanted(4)) report(4, both.c4, seconds);
    if (wanted(5)) report(5, both.c5, 0.0);
  }
  timed(6, criterion6);
  timed(7, criterion7);
  timed(8, criterion8);
  timed(9, criterion9);
  timed(10, criterion10);
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
