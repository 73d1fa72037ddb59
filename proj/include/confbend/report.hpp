#pragma once

#include <json.hpp>
#include <string>

#include "confbend/backgrounds.hpp"
#include "confbend/seed.hpp"
#include "confbend/solver.hpp"

namespace confbend {

using json = nlohmann::ordered_json;

json to_json(const Vec& v);
json to_json(const Grid& g);
json to_json(const ConeSpec& c);
json to_json(const std::vector<GateResult>& gates);
json to_json(const EquationParams& p);
json to_json(const Theorem21Report& r);
json to_json(const AddistrucReport& r);
json to_json(const Classification& c);
json to_json(const SeedReport& r);
json to_json(const EllipticityReport& r);
json to_json(const SolveReport& r);
json to_json(const UniquenessReport& r);
json to_json(const CovarianceReport& r);

/// Ranges of R and of the g-eigenvalues of Ric over the grid.
json curvature_summary(const MetricField& g, const CurvaturePack& curv);

/// Residual and margin traces, one row per accepted iterate.
void write_trace_csv(const std::string& path, const SolveReport& r);

}  // namespace confbend
