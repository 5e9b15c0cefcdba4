#include "lsieve/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "lsieve/characters.hpp"
#include "lsieve/euler_sums.hpp"
#include "lsieve/number_core.hpp"
#include "lsieve/random.hpp"
#include "lsieve/report_json.hpp"
#include "lsieve/sieve_inequality.hpp"

namespace lsieve {

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Context {
  std::string name;
  ExperimentConfig config;
  SumSpec spec;
  PrimeTable table;
  std::vector<Character> group;
  std::vector<std::size_t> indices;
  std::vector<Character> selected;
};

std::string default_selector(const std::string& name) { return name == "characters" ? "all" : "non-principal"; }

std::vector<std::size_t> parse_selector(const std::string& selector, std::size_t group_size) {
  std::vector<std::size_t> out;
  if (selector == "all") {
    for (std::size_t i = 0; i < group_size; ++i) out.push_back(i);
    return out;
  }
  if (selector == "non-principal") {
    for (std::size_t i = 1; i < group_size; ++i) out.push_back(i);
    return out;
  }
  std::set<std::size_t> seen;
  std::stringstream ss(selector);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long value = -1;
    try {
      value = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || value < 0) throw UsageError("bad character index '" + item + "'");
    const auto index = static_cast<std::size_t>(value);
    if (index >= group_size) {
      throw UsageError("character index " + item + " out of range (group has " + std::to_string(group_size) +
                       " characters)");
    }
    if (!seen.insert(index).second) throw UsageError("character index " + item + " listed twice");
    out.push_back(index);
  }
  if (out.empty()) throw UsageError("empty character selection");
  return out;
}

Json config_json(const Context& ctx) {
  const auto& c = ctx.config;
  Json j;
  j["subcommand"] = ctx.name;
  j["d"] = c.d;
  j["x"] = c.x;
  j["b_exponent"] = c.b_exponent;
  j["characters"] = c.characters;
  j["coefficients"] = c.coefficients;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["c_override"] = c.c_override ? Json(*c.c_override) : Json(nullptr);
  j["sigma_max"] = c.sigma_max ? Json(*c.sigma_max) : Json(nullptr);
  j["output"] = c.output;
  j["format"] = c.format;
  return j;
}

std::string csv_header(const Context& ctx) {
  std::ostringstream os;
  const Json config = config_json(ctx);
  for (const auto& [key, value] : config.items()) os << "# " << key << '=' << value.dump() << '\n';
  return os.str();
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

struct Draw {
  CoefficientVector a;
  std::uint64_t seed;
};

Draw draw_coefficients(const Context& ctx, std::int64_t trial) {
  const auto& c = ctx.config;
  const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(trial);
  if (c.coefficients == "ones") return {CoefficientVector::ones(ctx.table, c.d, c.x), c.seed};
  if (c.coefficients == "random-complex") return {CoefficientVector::random_complex(ctx.table, c.d, c.x, seed), seed};
  if (c.coefficients == "random-real") return {CoefficientVector::random_real(ctx.table, c.d, c.x, seed), seed};
  try {
    return {CoefficientVector::from_file(c.coefficients, ctx.table, c.d, c.x), c.seed};
  } catch (const std::exception& e) {
    throw UsageError(std::string("coefficients: ") + e.what());
  }
}

struct Output {
  Json json;
  std::string csv;
  int code = kExitPass;
};

// ---------------------------------------------------------------------------

Output cmd_characters(const Context& ctx) {
  Output out;
  const auto ortho = verify_orthogonality(ctx.config.d);
  out.json["modulus"] = ctx.config.d;
  out.json["group_size"] = ctx.group.size();
  out.json["orthogonality_max_deviation"] = ortho.max_deviation;
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "n";
  for (std::size_t i : ctx.indices) csv << ",chi" << i << "_re,chi" << i << "_im";
  csv << '\n';
  for (std::size_t i : ctx.indices) {
    const Character& chi = ctx.group[i];
    Json row = to_json(chi);
    row["index"] = i;
    row["conductor"] = conductor(chi);
    row["primitive"] = is_primitive(chi);
    row["real"] = is_real(chi);
    Json values = Json::array();
    for (std::int64_t n = 1; n <= ctx.config.d; ++n) {
      const auto v = evaluate(chi, n);
      values.push_back({v.real(), v.imag()});
    }
    row["values"] = std::move(values);
    rows.push_back(std::move(row));
  }
  for (std::int64_t n = 1; n <= ctx.config.d; ++n) {
    csv << n;
    for (std::size_t i : ctx.indices) {
      const auto v = evaluate(ctx.group[i], n);
      csv << ',' << num(v.real()) << ',' << num(v.imag());
    }
    csv << '\n';
  }
  out.json["characters"] = std::move(rows);
  out.csv = csv.str();
  return out;
}

Output cmd_lemma_scan(const Context& ctx) {
  Output out;
  const auto w_grid = dyadic_grid(ctx.config.d, ctx.config.x);
  Json scans = Json::array();
  std::ostringstream csv;
  csv << "character,w,y,t,sigma,re_value,abs_value\n";
  double overall = 0.0;
  for (std::size_t s = 0; s < ctx.selected.size(); ++s) {
    if (is_principal(ctx.selected[s])) continue;
    const auto report = lemma_sup_scan(ctx.table, ctx.selected[s], ctx.spec, w_grid, {});
    overall = std::max(overall, report.max_value);
    Json entry;
    entry["character_index"] = ctx.indices[s];
    entry["character"] = to_json(ctx.selected[s]);
    entry["scan"] = to_json(report);
    scans.push_back(std::move(entry));
    std::ostringstream rows;
    write_lemma_profile_csv(rows, ctx.table, ctx.selected[s], report);
    std::istringstream in(rows.str());
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) csv << ctx.indices[s] << ',' << line << '\n';
  }
  out.json["w_grid"] = w_grid;
  out.json["max_value"] = overall;
  out.json["scans"] = std::move(scans);
  out.csv = csv.str();
  return out;
}

struct Constants {
  double L = 0.0;
  double c1 = 0.0;
  double c_used = 0.0;
  std::optional<C1Estimate> estimate;
};

Constants constants(const Context& ctx) {
  Constants k;
  k.L = sum_reciprocal_primes(ctx.config.d, ctx.config.x, ctx.table);
  if (ctx.selected.size() >= 2) {
    k.estimate = estimate_c1(ctx.table, ctx.selected, ctx.spec);
    k.c1 = k.estimate->c1;
  }
  k.c_used = ctx.config.c_override.value_or(default_c_from_c1(k.c1));
  if (k.c_used < 0.0) throw UsageError("--c must be >= 0");
  return k;
}

Output cmd_verify(const Context& ctx, bool variant) {
  Output out;
  const Constants k = constants(ctx);
  out.json["L"] = k.L;
  out.json["c1_hat"] = k.c1;
  out.json["c_default"] = default_c_from_c1(k.c1);
  out.json["c_used"] = k.c_used;
  out.json["rhs_form"] = variant ? "2(L + k c) sum |a_p|^2/p" : "(4L + (k-1) c) sum |a_p|^2/p";
  Json reports = Json::array();
  std::ostringstream csv;
  csv << "trial,seed,k,lhs,rhs,ratio,c_used,lambda_max,passed\n";
  bool all = true;
  for (std::int64_t trial = 0; trial < ctx.config.trials; ++trial) {
    Draw draw = draw_coefficients(ctx, trial);
    VerificationReport r = variant ? variant_re_bound(ctx.table, draw.a, ctx.selected, ctx.spec, k.c_used)
                                   : verify_theorem(ctx.table, draw.a, ctx.selected, ctx.spec, k.c_used);
    r.seed = draw.seed;
    for (auto& w : r.witnesses) w.character_index = ctx.indices[w.character_index];
    all = all && r.passed;
    Json entry = to_json(r);
    entry["trial"] = trial;
    reports.push_back(std::move(entry));
    csv << trial << ',' << draw.seed << ',' << r.k << ',' << num(r.lhs) << ',' << num(r.rhs) << ',' << num(r.ratio)
        << ',' << num(r.c_used) << ',' << (r.lambda_max ? num(*r.lambda_max) : "") << ','
        << (r.passed ? "true" : "false") << '\n';
  }
  out.json["reports"] = std::move(reports);
  out.json["passed"] = all;
  out.csv = csv.str();
  out.code = all ? kExitPass : kExitViolation;
  return out;
}

Output cmd_estimate_constants(const Context& ctx) {
  if (ctx.selected.size() < 2) throw UsageError("estimate-constants needs at least two characters");
  Output out;
  const Constants k = constants(ctx);
  const double kk = static_cast<double>(ctx.selected.size());
  const double c = default_c_from_c1(k.c1);
  out.json["k"] = ctx.selected.size();
  out.json["L"] = k.L;
  out.json["c1"] = to_json(*k.estimate);
  out.json["c_default"] = c;
  out.json["delta_real_coefficients"] = k.L + (kk - 1.0) * k.c1;
  out.json["factor_theorem_form"] = 4.0 * k.L + (kk - 1.0) * c;
  out.json["factor_dual_form"] = 4.0 * (k.L + k.c1 * kk);
  std::ostringstream csv;
  csv << "name,value\n";
  for (const auto& [key, value] : out.json.items()) {
    if (value.is_number()) csv << key << ',' << num(value.get<double>()) << '\n';
  }
  csv << "c1_hat," << num(k.c1) << '\n';
  out.csv = csv.str();
  return out;
}

Output cmd_extremal(const Context& ctx) {
  Output out;
  const Constants k = constants(ctx);
  const std::size_t rows = ctx.selected.size();
  const double T = ctx.spec.t_bound();
  Rng rng(ctx.config.seed);
  Json configs = Json::array();
  std::ostringstream csv;
  csv << "configuration,lambda_max,L,ratio_to_L,ratio_to_real_bound,max_diagonal\n";
  bool sane = true;
  for (std::int64_t c = 0; c <= ctx.config.trials; ++c) {
    std::vector<double> shifts(rows, 0.0);
    std::vector<std::int64_t> cutoffs(rows, ctx.config.x);
    if (c > 0) {
      for (std::size_t j = 0; j < rows; ++j) {
        shifts[j] = rng.uniform(-T, T);
        cutoffs[j] = ctx.config.d + static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(ctx.config.x - ctx.config.d + 1));
      }
    }
    const auto r = extremal_ratio(ctx.table, ctx.selected, ctx.spec, shifts, cutoffs, k.c1);
    sane = sane && r.lambda_max >= r.max_diagonal * (1.0 - 1e-12);
    Json entry = to_json(r);
    entry["configuration"] = c;
    entry["shifts"] = shifts;
    entry["cutoffs"] = cutoffs;
    configs.push_back(std::move(entry));
    csv << c << ',' << num(r.lambda_max) << ',' << num(r.L) << ',' << num(r.ratio_to_L) << ','
        << num(r.ratio_to_real_bound) << ',' << num(r.max_diagonal) << '\n';
  }
  out.json["c1_hat"] = k.c1;
  out.json["configurations"] = std::move(configs);
  out.json["sane"] = sane;
  out.csv = csv.str();
  out.code = sane ? kExitPass : kExitViolation;
  return out;
}

Output cmd_duality(const Context& ctx) {
  Output out;
  Json checks = Json::array();
  std::ostringstream csv;
  csv << "check,lambda_gram,lambda_prime,max_trial_quotient,pullback_rel_error,passed\n";
  bool all = true;
  auto record = [&](const std::string& name, const DualityReport& r, bool extra = true) {
    const bool ok = r.passed && extra;
    all = all && ok;
    Json entry = to_json(r);
    entry["check"] = name;
    entry["passed"] = ok;
    checks.push_back(std::move(entry));
    csv << name << ',' << num(r.lambda_gram) << ',' << num(r.lambda_prime) << ',' << num(r.max_trial_quotient) << ','
        << num(r.pullback_rel_error) << ',' << (ok ? "true" : "false") << '\n';
  };
  constexpr std::size_t kVectors = 100;

  Eigen::MatrixXcd fixture = Eigen::MatrixXcd::Zero(2, 2);
  fixture(0, 0) = 1.0;
  fixture(1, 1) = 2.0;
  const auto fixed = duality_check(DeltaMatrix::synthetic(fixture), kVectors, ctx.config.seed);
  record("synthetic-diag-1-2", fixed, std::abs(fixed.lambda_gram - 4.0) <= 1e-10);

  Rng rng(ctx.config.seed);
  for (std::int64_t t = 0; t < ctx.config.trials; ++t) {
    const auto k = static_cast<Eigen::Index>(1 + rng.next() % 8);
    const auto n = static_cast<Eigen::Index>(1 + rng.next() % 200);
    Eigen::MatrixXcd d(k, n);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index m = 0; m < n; ++m) d(i, m) = rng.complex_normal();
    }
    record("synthetic-random-" + std::to_string(t), duality_check(DeltaMatrix::synthetic(d), kVectors, ctx.config.seed + static_cast<std::uint64_t>(t)));
  }

  const std::size_t rows = ctx.selected.size();
  const std::vector<double> zero(rows, 0.0);
  const std::vector<std::int64_t> full(rows, ctx.config.x);
  record("characters-t0", duality_check(build_delta(ctx.table, ctx.selected, zero, full, ctx.spec), kVectors,
                                        ctx.config.seed, &ctx.table));
  std::vector<double> shifts(rows);
  std::vector<std::int64_t> cutoffs(rows);
  for (std::size_t j = 0; j < rows; ++j) {
    shifts[j] = rng.uniform(-ctx.spec.t_bound(), ctx.spec.t_bound());
    cutoffs[j] = ctx.config.d + static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(ctx.config.x - ctx.config.d + 1));
  }
  record("characters-random", duality_check(build_delta(ctx.table, ctx.selected, shifts, cutoffs, ctx.spec), kVectors,
                                            ctx.config.seed, &ctx.table));
  out.json["checks"] = std::move(checks);
  out.json["passed"] = all;
  out.csv = csv.str();
  out.code = all ? kExitPass : kExitViolation;
  return out;
}

Output cmd_abel(const Context& ctx) {
  Output out;
  Json reports = Json::array();
  std::ostringstream csv;
  csv << "trial,seed,character,m_sigma_one,m_rect,ratio,within_bound\n";
  bool all = true;
  double worst = 0.0;
  for (std::int64_t trial = 0; trial < ctx.config.trials; ++trial) {
    const Draw draw = draw_coefficients(ctx, trial);
    for (std::size_t s = 0; s < ctx.selected.size(); ++s) {
      const auto r = abel_reduction_check(ctx.table, ctx.selected[s], draw.a, ctx.spec);
      all = all && r.within_bound;
      worst = std::max(worst, r.ratio);
      Json entry = to_json(r);
      entry["trial"] = trial;
      entry["seed"] = draw.seed;
      entry["character_index"] = ctx.indices[s];
      reports.push_back(std::move(entry));
      csv << trial << ',' << draw.seed << ',' << ctx.indices[s] << ',' << num(r.m_sigma_one) << ',' << num(r.m_rect)
          << ',' << num(r.ratio) << ',' << (r.within_bound ? "true" : "false") << '\n';
    }
  }
  out.json["max_ratio"] = worst;
  out.json["reports"] = std::move(reports);
  out.json["passed"] = all;
  out.csv = csv.str();
  out.code = all ? kExitPass : kExitViolation;
  return out;
}

}  // namespace

void validate(const ExperimentConfig& config) {
  if (config.d < 1) throw std::invalid_argument("d must be >= 1");
  if (config.d > config.x) {
    throw std::invalid_argument("d must not exceed x (d=" + std::to_string(config.d) + ", x=" + std::to_string(config.x) + ")");
  }
  if (config.x > kMaxSieveLimit) throw std::invalid_argument("x exceeds the sieve limit " + std::to_string(kMaxSieveLimit));
  if (!(config.b_exponent > 0.0)) throw std::invalid_argument("b must be > 0");
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (config.sigma_max && !(*config.sigma_max >= 1.0)) throw std::invalid_argument("sigma-max must be >= 1");
  if (config.c_override && !(*config.c_override >= 0.0)) throw std::invalid_argument("c must be >= 0");
  if (config.format != "json" && config.format != "csv") throw std::invalid_argument("format must be json or csv");
}

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"characters",         "lemma-scan", "verify",
                                              "variant-verify",     "estimate-constants",
                                              "extremal",           "duality-selftest",
                                              "abel-check"};
  return names;
}

int run_subcommand(const std::string& name, const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  const auto& names = subcommand_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    err << "error: unknown subcommand '" << name << "'\n";
    return kExitUsage;
  }
  Output result;
  Context ctx;
  try {
    validate(config);
    ctx.name = name;
    ctx.config = config;
    if (ctx.config.characters.empty()) ctx.config.characters = default_selector(name);
    ctx.spec = SumSpec{config.d, config.x, config.b_exponent, config.sigma_max};
    ctx.table = sieve_primes(std::max<std::int64_t>(config.x, 2));
    ctx.group = character_group(config.d);
    ctx.indices = parse_selector(ctx.config.characters, ctx.group.size());
    for (std::size_t i : ctx.indices) ctx.selected.push_back(ctx.group[i]);

    if (name == "characters") {
      result = cmd_characters(ctx);
    } else if (name == "lemma-scan") {
      result = cmd_lemma_scan(ctx);
    } else if (name == "verify") {
      result = cmd_verify(ctx, false);
    } else if (name == "variant-verify") {
      result = cmd_verify(ctx, true);
    } else if (name == "estimate-constants") {
      result = cmd_estimate_constants(ctx);
    } else if (name == "extremal") {
      result = cmd_extremal(ctx);
    } else if (name == "duality-selftest") {
      result = cmd_duality(ctx);
    } else {
      result = cmd_abel(ctx);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::string text;
  if (ctx.config.format == "csv") {
    text = csv_header(ctx) + result.csv;
  } else {
    Json doc;
    doc["config"] = config_json(ctx);
    for (auto& [key, value] : result.json.items()) doc[key] = value;
    text = doc.dump(2) + "\n";
  }
  if (config.output.empty() || config.output == "-") {
    out << text;
  } else {
    std::ofstream file(config.output, std::ios::binary);
    file << text;
    if (!file) {
      err << "error: cannot write " << config.output << '\n';
      return kExitUsage;
    }
  }
  return result.code;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Large sieve inequality experiments for Dirichlet characters"};
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.require_subcommand(1, 1);
  app.fallthrough();

  ExperimentConfig config;
  config.characters.clear();
  double c_value = 0.0;
  double sigma_value = 1.0;
  app.add_option("--d", config.d, "modulus D")->capture_default_str();
  app.add_option("--x", config.x, "outer prime limit x")->capture_default_str();
  app.add_option("--b", config.b_exponent, "exponent B in |t| <= D^B")->capture_default_str();
  std::vector<std::string> chars;
  app.add_option("--chars", chars, "all | non-principal | comma-separated indices")->delimiter(',');
  app.add_option("--coeffs", config.coefficients, "ones | random-complex | random-real | path")->capture_default_str();
  app.add_option("--trials", config.trials, "number of seeded draws")->capture_default_str();
  app.add_option("--seed", config.seed, "base seed")->capture_default_str();
  auto* c_opt = app.add_option("--c", c_value, "constant c (default 4 * c1_hat)");
  auto* sigma_opt = app.add_option("--sigma-max", sigma_value, "rectangle height (default automatic)");
  app.add_option("--out", config.output, "output path (default stdout)");
  app.add_option("--format", config.format, "json | csv")->capture_default_str();
  static const std::map<std::string, std::string> descriptions{
      {"characters", "character table mod D"},
      {"lemma-scan", "empirical sup of Re sum chi(p) p^{-1-it} per character"},
      {"verify", "the inequality for seeded coefficient draws"},
      {"variant-verify", "real-part form with rhs 2(L + k c)"},
      {"estimate-constants", "c1_hat, L and both rhs normalizations"},
      {"extremal", "largest Gram eigenvalue against L"},
      {"duality-selftest", "numerical duality on synthetic and character matrices"},
      {"abel-check", "rectangle maximum against its sigma = 1 restriction"}};
  for (const auto& name : subcommand_names()) app.add_subcommand(name, descriptions.at(name));

  std::vector<std::string> reversed;
  for (std::size_t i = args.size(); i > 1; --i) reversed.push_back(args[i - 1]);
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  for (std::size_t i = 0; i < chars.size(); ++i) config.characters += (i > 0 ? "," : "") + chars[i];
  if (c_opt->count() > 0) config.c_override = c_value;
  if (sigma_opt->count() > 0) config.sigma_max = sigma_value;
  return run_subcommand(app.get_subcommands().front()->get_name(), config, out, err);
}

}  // namespace lsieve
