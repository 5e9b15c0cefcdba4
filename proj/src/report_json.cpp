#include "lsieve/report_json.hpp"

namespace lsieve {

Json to_json(const RectangleMaxWitness& witness) {
  Json j;
  j["value"] = witness.value;
  j["y_star"] = witness.y_star;
  j["t_star"] = witness.t_star;
  j["sigma_star"] = witness.sigma_star;
  j["refined"] = witness.refined;
  return j;
}

Json to_json(const VerificationReport& report) {
  Json j;
  j["d"] = report.D;
  j["x"] = report.x;
  j["b_exponent"] = report.B;
  j["k"] = report.k;
  j["lhs"] = report.lhs;
  j["rhs"] = report.rhs;
  j["ratio"] = report.ratio;
  j["c_used"] = report.c_used;
  j["lambda_max"] = report.lambda_max ? Json(*report.lambda_max) : Json(nullptr);
  j["seed"] = report.seed ? Json(*report.seed) : Json(nullptr);
  Json witnesses = Json::array();
  for (const auto& w : report.witnesses) {
    Json entry;
    entry["character_index"] = w.character_index;
    entry["y_star"] = w.witness.y_star;
    entry["t_star"] = w.witness.t_star;
    entry["sigma_star"] = w.witness.sigma_star;
    entry["value"] = w.witness.value;
    witnesses.push_back(std::move(entry));
  }
  j["witnesses"] = std::move(witnesses);
  j["passed"] = report.passed;
  j["L"] = report.L;
  j["weighted_norm"] = report.weighted_norm;
  j["rhs_dual_form"] = report.rhs_dual_form;
  j["ratio_dual_form"] = report.ratio_dual_form;
  return j;
}

Json to_json(const DualityReport& report) {
  Json j;
  j["lambda_gram"] = report.lambda_gram;
  j["lambda_prime"] = report.lambda_prime;
  j["lambda_rel_diff"] = report.lambda_rel_diff;
  j["trials"] = report.trials;
  j["seed"] = report.seed;
  j["max_trial_quotient"] = report.max_trial_quotient;
  j["pullback_quotient"] = report.pullback_quotient;
  j["pullback_rel_error"] = report.pullback_rel_error;
  j["passed"] = report.passed;
  return j;
}

Json to_json(const LemmaScanReport& report) {
  Json j;
  j["max_value"] = report.max_value;
  j["w_star"] = report.w_star;
  j["y_star"] = report.y_star;
  j["t_star"] = report.t_star;
  j["refined"] = report.refined;
  j["t_grid"] = {{"half_width", report.grid.half_width}, {"intervals", report.grid.intervals}};
  Json profile = Json::array();
  for (const auto& e : report.profile) {
    profile.push_back({{"w", e.w}, {"value", e.value}, {"y_star", e.y_star}, {"t_star", e.t_star}});
  }
  j["profile"] = std::move(profile);
  return j;
}

Json to_json(const AbelReport& report) {
  Json j;
  j["m_sigma_one"] = report.m_sigma_one;
  j["m_rect"] = report.m_rect;
  j["ratio"] = report.ratio;
  j["within_bound"] = report.within_bound;
  j["sigma_one_witness"] = to_json(report.sigma_one_witness);
  j["rect_witness"] = to_json(report.rect_witness);
  j["sigma_grid"] = report.sigma_grid;
  return j;
}

Json to_json(const ExtremalReport& report) {
  Json j;
  j["k"] = report.k;
  j["L"] = report.L;
  j["c1_hat"] = report.c1;
  j["lambda_max"] = report.lambda_max;
  j["ratio_to_L"] = report.ratio_to_L;
  j["ratio_to_real_bound"] = report.ratio_to_real_bound;
  j["max_diagonal"] = report.max_diagonal;
  j["lambda_diagonal_only"] = report.lambda_diagonal_only;
  return j;
}

Json to_json(const C1Estimate& estimate) {
  Json j;
  j["c1_hat"] = estimate.c1;
  j["raw_max"] = estimate.raw_max;
  j["distinct_quotients"] = estimate.distinct_quotients;
  j["worst_quotient"] = estimate.worst_quotient ? to_json(*estimate.worst_quotient) : Json(nullptr);
  j["y_star"] = estimate.worst.y_star;
  j["u_star"] = estimate.worst.t_star;
  return j;
}

Json to_json(const Character& chi) {
  Json j;
  j["modulus"] = chi.modulus();
  j["exponents"] = chi.exponents();
  j["order"] = order(chi);
  return j;
}

}  // namespace lsieve
