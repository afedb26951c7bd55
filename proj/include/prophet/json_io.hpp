#pragma once

#include "json.hpp"

#include "prophet/certificate.hpp"
#include "prophet/dp_engine.hpp"
#include "prophet/lp_model.hpp"
#include "prophet/nls_solver.hpp"
#include "prophet/simulator.hpp"
#include "prophet/ssap.hpp"

namespace prophet {

inline constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const ThetaSolution& ts);
nlohmann::json to_json(const DerivedConstants& c);
nlohmann::json to_json(const Theorem2Bound& b);
nlohmann::json to_json(const DPTable& dp);
nlohmann::json to_json(const RatioReport& r);
nlohmann::json to_json(const PrimalSolution& s, bool with_solution = false);
nlohmann::json to_json(const SlackReport& r, bool with_per_t = false);
nlohmann::json to_json(const CoverageReport& r);
nlohmann::json to_json(const CertifiedBound& b, bool with_schedule = false);
nlohmann::json to_json(const SSAPThresholds& th);
nlohmann::json to_json(const SimReport& r);
nlohmann::json to_json(const AlphaReport& r);

}  // namespace prophet
