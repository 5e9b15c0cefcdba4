// Writes the stored Lemma-scan thresholds: one fine-grid sweep per (D, x).

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lsieve/lemma_sweep.hpp"
#include "lsieve/number_core.hpp"
#include "lsieve/report_json.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fine-grid oracle run for the Lemma-scan thresholds"};
  std::int64_t max_d = 101;
  std::int64_t max_x = 100'000;
  std::size_t subdivide = 4;
  double b = 1.0;
  double margin = 1e-3;
  std::string out = "lemma_thresholds.json";
  app.add_option("--max-d", max_d)->capture_default_str();
  app.add_option("--max-x", max_x)->capture_default_str();
  app.add_option("--subdivide", subdivide, "split factor of the default t grid")->capture_default_str();
  app.add_option("--b", b)->capture_default_str();
  app.add_option("--margin", margin, "absolute slack added to each oracle maximum")->capture_default_str();
  app.add_option("--out", out)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const lsieve::PrimeTable table = lsieve::sieve_primes(max_x);
  lsieve::Json doc;
  doc["b_exponent"] = b;
  doc["max_d"] = max_d;
  doc["max_x"] = max_x;
  doc["grid_subdivision"] = subdivide;
  doc["margin"] = margin;
  lsieve::Json entries = lsieve::Json::array();
  double global = 0.0;
  for (std::int64_t x : lsieve::sweep_x_values(max_x)) {
    const auto start = std::chrono::steady_clock::now();
    for (std::int64_t d = 3; d <= max_d; ++d) {
      const auto point = lsieve::lemma_sweep_max(table, d, x, b, subdivide);
      global = std::max(global, point.max_value);
      entries.push_back({{"d", d},
                         {"x", x},
                         {"oracle_max", point.max_value},
                         {"threshold", point.max_value + margin},
                         {"character_index", point.character_index},
                         {"w_star", point.w_star},
                         {"y_star", point.y_star},
                         {"t_star", point.t_star}});
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "x=" << x << " done in " << seconds << " s\n";
  }
  doc["global_oracle_max"] = global;
  doc["entries"] = std::move(entries);
  std::ofstream file(out);
  file << doc.dump(1) << '\n';
  return file ? 0 : 1;
}
