#include "lsieve/sieve_inequality.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "lsieve/parallel.hpp"
#include "lsieve/random.hpp"

namespace lsieve {

namespace {

void require_distinct(std::span<const Character> characters, const char* where) {
  for (std::size_t j = 0; j < characters.size(); ++j) {
    for (std::size_t l = j + 1; l < characters.size(); ++l) {
      if (characters[j] == characters[l]) {
        throw std::domain_error(std::string(where) + ": characters " + std::to_string(j) + " and " +
                                std::to_string(l) + " coincide");
      }
    }
  }
}

void require_modulus(std::span<const Character> characters, std::int64_t D, const char* where) {
  for (const auto& chi : characters) {
    if (chi.modulus() != D) throw std::domain_error(std::string(where) + ": character modulus differs from D");
  }
}

Eigen::VectorXcd random_unit(std::size_t dim, Rng& rng) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return v;
}

void normalize_phase(Eigen::VectorXcd& v) {
  if (v.size() == 0) return;
  Eigen::Index at = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(at)) * (1.0 + 1e-12)) at = i;
  }
  const double modulus = std::abs(v(at));
  if (modulus > 0.0) v *= std::conj(v(at)) / modulus;
}

/// Power iteration for a Hermitian PSD operator given by its action.
EigenPair power_iterate(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply, std::size_t dim,
                        double trace, const PowerIterationOptions& options) {
  EigenPair out;
  if (dim == 0) {
    out.converged = true;
    return out;
  }
  Rng rng(options.seed);
  Eigen::VectorXcd v = random_unit(dim, rng);
  const double tolerance = options.residual_tolerance * std::max(trace, std::numeric_limits<double>::min());
  for (std::size_t iter = 1; iter <= options.max_iterations; ++iter) {
    const Eigen::VectorXcd w = apply(v);
    const double lambda = v.dot(w).real();  // v^* w
    const double residual = (w - lambda * v).norm();
    out.lambda = lambda;
    out.vector = v;
    out.iterations = iter;
    out.residual = residual;
    const double norm = w.norm();
    if (residual <= tolerance || norm == 0.0) {
      out.converged = true;
      break;
    }
    v = w / norm;
  }
  normalize_phase(out.vector);
  return out;
}

std::complex<double> gram_entry(const PrimeTable& table, const DeltaRow& j, const DeltaRow& l, std::int64_t D) {
  const std::int64_t y = std::min(j.y, l.y);
  return char_prime_sum(table, product(j.chi, conjugate(l.chi)), D, y, {1.0, j.t - l.t});
}

VerificationReport verify_common(const PrimeTable& table, const CoefficientVector& a,
                                 std::span<const Character> characters, const SumSpec& spec, double c,
                                 const RectangleOptions& rectangle, const char* where) {
  spec.validate();
  if (characters.empty()) throw std::domain_error(std::string(where) + ": no characters");
  if (!(c >= 0.0)) throw std::domain_error(std::string(where) + ": c must be >= 0");
  require_modulus(characters, spec.D, where);
  require_distinct(characters, where);
  if (a.D() != spec.D || a.x() != spec.x) throw std::domain_error(std::string(where) + ": coefficients do not match (D, x]");
  if (a.all_zero()) throw std::domain_error(std::string(where) + ": coefficient vector is identically zero");

  VerificationReport report;
  report.D = spec.D;
  report.x = spec.x;
  report.B = spec.B;
  report.k = characters.size();
  report.c_used = c;
  report.L = sum_reciprocal_primes(spec.D, spec.x, table);
  report.weighted_norm = a.weighted_norm2();
  CompensatedSum<double> lhs;
  for (std::size_t j = 0; j < characters.size(); ++j) {
    const auto witness = rectangle_max(table, characters[j], a, spec, rectangle);
    lhs += witness.value * witness.value;
    report.witnesses.push_back({j, witness});
  }
  report.lhs = lhs.value();
  return report;
}

void finish(VerificationReport& report) {
  report.ratio = report.rhs > 0.0 ? report.lhs / report.rhs
                                  : (report.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  report.ratio_dual_form = report.rhs_dual_form > 0.0 ? report.lhs / report.rhs_dual_form : report.ratio;
  report.passed = report.lhs <= report.rhs * (1.0 + 1e-9);
}

}  // namespace

// ---------------------------------------------------------------------------
// Delta matrix and Gram matrix

DeltaMatrix DeltaMatrix::build(const PrimeTable& table, std::span<const Character> characters,
                               std::span<const double> shifts, std::span<const std::int64_t> cutoffs,
                               const SumSpec& spec, const DeltaOptions& options) {
  spec.validate();
  if (characters.empty()) throw std::domain_error("build_delta: need at least one row");
  if (shifts.size() != characters.size() || cutoffs.size() != characters.size()) {
    throw std::domain_error("build_delta: characters, shifts and cutoffs differ in length");
  }
  if (table.limit() < spec.x) throw std::out_of_range("build_delta: prime table does not reach x");
  require_modulus(characters, spec.D, "build_delta");
  if (!options.allow_duplicates) require_distinct(characters, "build_delta");
  const double T = spec.t_bound();
  for (std::size_t j = 0; j < characters.size(); ++j) {
    if (!(std::abs(shifts[j]) <= T * (1.0 + 1e-12))) {
      throw std::domain_error("build_delta: |t_" + std::to_string(j) + "| exceeds D^B");
    }
    if (cutoffs[j] < spec.D || cutoffs[j] > spec.x) {
      throw std::domain_error("build_delta: cutoff y_" + std::to_string(j) + " outside [D, x]");
    }
  }

  DeltaMatrix out;
  out.spec_ = spec;
  const auto [first, last] = table.range(spec.D, spec.x);
  out.primes_.assign(table.primes().begin() + static_cast<std::ptrdiff_t>(first),
                     table.primes().begin() + static_cast<std::ptrdiff_t>(last));
  const auto n = static_cast<Eigen::Index>(last - first);
  out.dense_ = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(characters.size()), n);
  for (std::size_t j = 0; j < characters.size(); ++j) {
    out.rows_.push_back({characters[j], shifts[j], cutoffs[j]});
    const auto chi_p = character_values_at_primes(characters[j], table, first, last);
    for (Eigen::Index m = 0; m < n; ++m) {
      const std::int64_t p = out.primes_[static_cast<std::size_t>(m)];
      if (p > cutoffs[j]) break;
      const double log_p = table.log_p()[first + static_cast<std::size_t>(m)];
      out.dense_(static_cast<Eigen::Index>(j), m) =
          chi_p[static_cast<std::size_t>(m)] * std::polar(1.0 / std::sqrt(static_cast<double>(p)), -shifts[j] * log_p);
    }
  }
  return out;
}

DeltaMatrix DeltaMatrix::synthetic(Eigen::MatrixXcd entries) {
  if (entries.rows() == 0) throw std::domain_error("DeltaMatrix::synthetic: need at least one row");
  DeltaMatrix out;
  out.synthetic_ = true;
  out.dense_ = std::move(entries);
  return out;
}

DeltaMatrix build_delta(const PrimeTable& table, std::span<const Character> characters,
                        std::span<const double> shifts, std::span<const std::int64_t> cutoffs, const SumSpec& spec,
                        const DeltaOptions& options) {
  return DeltaMatrix::build(table, characters, shifts, cutoffs, spec, options);
}

Eigen::MatrixXcd dense_gram(const DeltaMatrix& delta) {
  Eigen::MatrixXcd m = delta.dense() * delta.dense().adjoint();
  for (Eigen::Index j = 0; j < m.rows(); ++j) m(j, j) = m(j, j).real();
  return m;
}

Eigen::MatrixXcd gram_matrix(const PrimeTable& table, const DeltaMatrix& delta) {
  if (delta.is_synthetic()) return dense_gram(delta);
  const std::size_t k = delta.k();
  const std::int64_t D = delta.spec().D;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = 0; l <= j; ++l) pairs.emplace_back(j, l);
  }
  std::vector<std::complex<double>> values(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto [j, l] = pairs[i];
    values[i] = gram_entry(table, delta.rows()[j], delta.rows()[l], D);
  });
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(pairs[i].first);
    const auto l = static_cast<Eigen::Index>(pairs[i].second);
    if (j == l) {
      m(j, j) = values[i].real();
    } else {
      m(j, l) = values[i];
      m(l, j) = std::conj(values[i]);
    }
  }
  return m;
}

double cross_term(const PrimeTable& table, const Character& chi_j, const Character& chi_l, double t_j, double t_l,
                  std::int64_t y, const SumSpec& spec) {
  spec.validate();
  if (chi_j.modulus() != spec.D || chi_l.modulus() != spec.D) {
    throw std::domain_error("cross_term: character modulus differs from D");
  }
  if (chi_j == chi_l) throw std::domain_error("cross_term: characters must differ");
  if (y < spec.D || y > spec.x) throw std::domain_error("cross_term: y outside [D, x]");
  return char_prime_sum(table, product(chi_j, conjugate(chi_l)), spec.D, y, {1.0, t_j - t_l}).real();
}

C1Estimate estimate_c1(const PrimeTable& table, std::span<const Character> characters, const SumSpec& spec,
                       const C1Options& options) {
  spec.validate();
  if (characters.size() < 2) throw std::domain_error("estimate_c1: need at least two characters");
  require_modulus(characters, spec.D, "estimate_c1");
  require_distinct(characters, "estimate_c1");

  // psi and conj(psi) give the same maximum on a symmetric grid, so one of each pair is enough.
  std::map<std::vector<std::int64_t>, Character> quotients;
  for (std::size_t j = 0; j < characters.size(); ++j) {
    for (std::size_t l = 0; l < characters.size(); ++l) {
      if (j == l) continue;
      const Character psi = product(characters[j], conjugate(characters[l]));
      if (quotients.count(conjugate(psi).exponents()) != 0) continue;
      quotients.emplace(psi.exponents(), psi);
    }
  }

  LemmaScanOptions scan_options;
  scan_options.grid = default_t_grid(spec, options.t_divisions).differences().subdivided(std::max<std::size_t>(options.subdivide, 1));
  scan_options.refine = options.refine;
  const std::vector<std::int64_t> w_grid{spec.D};

  C1Estimate out;
  out.distinct_quotients = quotients.size();
  out.raw_max = -std::numeric_limits<double>::infinity();
  for (const auto& [key, psi] : quotients) {
    LemmaScanReport report = lemma_sup_scan(table, psi, spec, w_grid, {}, scan_options);
    if (report.max_value > out.raw_max) {
      out.raw_max = report.max_value;
      out.worst_quotient = psi;
      out.worst = std::move(report);
    }
  }
  out.c1 = std::max(0.0, out.raw_max);
  return out;
}

// ---------------------------------------------------------------------------
// Eigenvalues and duality

EigenPair top_eigenpair(const Eigen::MatrixXcd& m, const PowerIterationOptions& options) {
  if (m.rows() != m.cols()) throw std::domain_error("top_eigenpair: matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > options.hermitian_tolerance * scale) {
    throw std::domain_error("top_eigenpair: matrix is not Hermitian");
  }
  const double trace = m.trace().real();
  return power_iterate([&](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(m * v); },
                       static_cast<std::size_t>(m.rows()), trace, options);
}

DualityReport duality_check(const DeltaMatrix& delta, std::size_t trials, std::uint64_t seed,
                            const PrimeTable* table) {
  if (trials < 1) throw std::domain_error("duality_check: trials must be >= 1");
  const Eigen::MatrixXcd& d = delta.dense();
  const Eigen::MatrixXcd gram = (table != nullptr && !delta.is_synthetic()) ? gram_matrix(*table, delta) : dense_gram(delta);

  PowerIterationOptions options;
  options.seed = seed;
  const EigenPair small = top_eigenpair(gram, options);
  const double frobenius2 = d.squaredNorm();
  const EigenPair large = power_iterate(
      [&](const Eigen::VectorXcd& a) { return Eigen::VectorXcd(d.adjoint() * (d * a)); },
      static_cast<std::size_t>(d.cols()), frobenius2, options);

  DualityReport report;
  report.trials = trials;
  report.seed = seed;
  report.lambda_gram = small.lambda;
  report.lambda_prime = large.lambda;
  const double lambda = small.lambda;
  const double denom = std::max(std::abs(lambda), std::numeric_limits<double>::min());
  report.lambda_rel_diff = std::abs(small.lambda - large.lambda) / denom;

  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const Eigen::VectorXcd a = random_unit(static_cast<std::size_t>(d.cols()), rng);
    report.max_trial_quotient = std::max(report.max_trial_quotient, (d * a).squaredNorm());
  }
  const Eigen::VectorXcd pullback = d.adjoint() * small.vector;
  const double pull_norm2 = pullback.squaredNorm();
  report.pullback_quotient = pull_norm2 > 0.0 ? (d * pullback).squaredNorm() / pull_norm2 : 0.0;
  report.pullback_rel_error = std::abs(report.pullback_quotient - lambda) / denom;
  report.passed = report.lambda_rel_diff <= 1e-8 && report.max_trial_quotient <= lambda * (1.0 + 1e-9) + 1e-300 &&
                  (lambda == 0.0 || report.pullback_rel_error <= 1e-8);
  return report;
}

FourWaySplit four_way_split(const Eigen::VectorXcd& b) {
  FourWaySplit split;
  const Eigen::Index n = b.size();
  for (auto& part : split.parts) part = Eigen::VectorXcd::Zero(n);
  for (auto& mag : split.magnitudes) mag = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double re = b(j).real();
    const double im = b(j).imag();
    split.magnitudes[0](j) = std::max(re, 0.0);
    split.magnitudes[1](j) = -std::min(re, 0.0);
    split.magnitudes[2](j) = std::max(im, 0.0);
    split.magnitudes[3](j) = -std::min(im, 0.0);
  }
  for (std::size_t r = 0; r < 4; ++r) {
    split.parts[r] = FourWaySplit::phases[r] * split.magnitudes[r].cast<std::complex<double>>();
  }
  return split;
}

double quadratic_form(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& b) { return b.dot(m * b).real(); }

Eigen::VectorXcd rescale_to_dual(const CoefficientVector& a) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = a[i] / std::sqrt(static_cast<double>(a.primes()[i]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// End-to-end checks

VerificationReport verify_theorem(const PrimeTable& table, const CoefficientVector& a,
                                  std::span<const Character> characters, const SumSpec& spec, double c,
                                  const VerifyOptions& options) {
  RectangleOptions rectangle = options.rectangle;
  rectangle.real_part = false;
  VerificationReport report = verify_common(table, a, characters, spec, c, rectangle, "verify_theorem");
  const double k = static_cast<double>(report.k);
  report.rhs = (4.0 * report.L + (k - 1.0) * c) * report.weighted_norm;
  report.rhs_dual_form = (4.0 * report.L + k * c) * report.weighted_norm;
  if (options.compute_lambda) {
    std::vector<double> shifts;
    std::vector<std::int64_t> cutoffs;
    for (const auto& w : report.witnesses) {
      shifts.push_back(w.witness.t_star);
      cutoffs.push_back(w.witness.y_star);
    }
    const DeltaMatrix delta = build_delta(table, characters, shifts, cutoffs, spec);
    report.lambda_max = top_eigenpair(gram_matrix(table, delta)).lambda;
  }
  finish(report);
  return report;
}

VerificationReport variant_re_bound(const PrimeTable& table, const CoefficientVector& a,
                                    std::span<const Character> characters, const SumSpec& spec, double c,
                                    const VerifyOptions& options) {
  RectangleOptions rectangle = options.rectangle;
  rectangle.real_part = true;
  VerificationReport report = verify_common(table, a, characters, spec, c, rectangle, "variant_re_bound");
  report.rhs = 2.0 * (report.L + static_cast<double>(report.k) * c) * report.weighted_norm;
  report.rhs_dual_form = report.rhs;
  finish(report);
  return report;
}

ExtremalReport extremal_ratio(const PrimeTable& table, std::span<const Character> characters,
                              const SumSpec& spec, std::span<const double> shifts,
                              std::span<const std::int64_t> cutoffs, double c1, const DeltaOptions& options) {
  const DeltaMatrix delta = build_delta(table, characters, shifts, cutoffs, spec, options);
  const Eigen::MatrixXcd gram = gram_matrix(table, delta);
  const EigenPair top = top_eigenpair(gram);

  ExtremalReport report;
  report.k = delta.k();
  report.L = sum_reciprocal_primes(spec.D, spec.x, table);
  report.c1 = c1;
  report.lambda_max = top.lambda;
  report.max_diagonal = gram.diagonal().real().maxCoeff();
  report.lambda_diagonal_only = report.max_diagonal;
  report.ratio_to_L = report.L > 0.0 ? top.lambda / report.L : 0.0;
  const double real_bound = report.L + static_cast<double>(report.k - 1) * c1;
  report.ratio_to_real_bound = real_bound > 0.0 ? top.lambda / real_bound : 0.0;
  report.eigenvector = top.vector;

  Eigen::VectorXcd dual = delta.dense().adjoint() * top.vector;
  const double norm = dual.norm();
  if (norm > 0.0) dual /= norm;
  report.primes.assign(delta.primes().begin(), delta.primes().end());
  for (Eigen::Index m = 0; m < dual.size(); ++m) {
    report.extremal_coefficients.push_back(dual(m) * std::sqrt(static_cast<double>(report.primes[static_cast<std::size_t>(m)])));
  }
  return report;
}

}  // namespace lsieve
