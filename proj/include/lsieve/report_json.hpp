#pragma once

// JSON views of the library's reports. Key order is fixed so that equal
// inputs serialize to equal bytes.

#include "json.hpp"

#include "lsieve/characters.hpp"
#include "lsieve/euler_sums.hpp"
#include "lsieve/sieve_inequality.hpp"

namespace lsieve {

using Json = nlohmann::ordered_json;

Json to_json(const RectangleMaxWitness& witness);
Json to_json(const VerificationReport& report);
Json to_json(const DualityReport& report);
Json to_json(const LemmaScanReport& report);
Json to_json(const AbelReport& report);
/// Summary fields only; the eigenvector and extremal coefficients are left out.
Json to_json(const ExtremalReport& report);
Json to_json(const C1Estimate& estimate);
Json to_json(const Character& chi);

}  // namespace lsieve
