#include "confbend/report.hpp"

#include <fstream>
#include <limits>

namespace confbend {

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Grid& g) {
  return {{"n", g.dim()}, {"sizes", g.sizes()}, {"periods", g.periods()}};
}

json to_json(const ConeSpec& c) {
  return {{"n", c.n}, {"k", c.k}, {"kappa", c.kappa}, {"theta_hat", c.theta_hat},
          {"certificate", to_json(c.theta_cert)}, {"varsigma", c.varsigma}};
}

json to_json(const std::vector<GateResult>& gates) {
  json a = json::array();
  for (const auto& g : gates) a.push_back({{"name", g.name}, {"passed", g.passed}, {"detail", g.detail}});
  return a;
}

json to_json(const EquationParams& p) {
  return {{"n", p.n},         {"alpha", p.alpha}, {"tau", p.tau},         {"varsigma", p.varsigma},
          {"k", p.cone.k},    {"rho", p.rho},     {"gamma", p.gamma},     {"a_scale", p.a_scale},
          {"c", p.c},         {"gates", to_json(p.gates)}};
}

json to_json(const Theorem21Report& r) {
  json j = {{"samples", r.samples}, {"violations", r.violations}, {"worst_slack", r.worst_slack}, {"passed", r.passed()}};
  if (r.witness.size()) j["witness"] = to_json(r.witness);
  return j;
}

json to_json(const AddistrucReport& r) {
  json j = {{"samples", r.samples}, {"violations", r.violations}, {"passed", r.passed()}};
  if (r.witness_lambda.size()) {
    j["witness_lambda"] = to_json(r.witness_lambda);
    j["witness_mu"] = to_json(r.witness_mu);
  }
  return j;
}

json to_json(const Classification& c) {
  return {{"class", to_string(c.cls)}, {"min_margin", c.min_margin}, {"max_margin", c.max_margin},
          {"argmin", c.argmin},        {"argmax", c.argmax},         {"strict_points", c.strict_points}};
}

json to_json(const SeedReport& r) {
  json attempts = json::array();
  for (const auto& a : r.attempts)
    attempts.push_back({{"N", a.N}, {"min_margin", a.min_margin}, {"argmin", a.argmin}, {"accepted", a.accepted}});
  json j = {{"accepted_N", r.accepted_N},
            {"escalations", r.attempts.size()},
            {"attempts", attempts},
            {"A_min_margin", r.A_min_margin},
            {"case1", {{"ball_points", r.ball_points},
                       {"A_min_margin", r.ball_A_min_margin},
                       {"V_min_margin", r.ball_V_min_margin}}},
            {"case2", {{"outside_points", r.outside_points}, {"m0", r.m0}, {"V_min_margin", r.outside_V_min_margin}}},
            {"key_vector_in_cone", r.key_vector_in_cone}};
  if (r.key_vector.size()) j["key_vector"] = to_json(r.key_vector);
  return j;
}

json to_json(const EllipticityReport& r) {
  return {{"min_eigenvalue", r.min_eigenvalue}, {"max_eigenvalue", r.max_eigenvalue}, {"ratio", r.ratio},
          {"argmin", r.argmin}, {"uniformly_elliptic", r.uniformly_elliptic()}};
}

json to_json(const SolveReport& r) {
  json steps = json::array();
  for (const auto& s : r.homotopy)
    steps.push_back({{"t", s.t}, {"dt", s.dt}, {"accepted", s.accepted}, {"newton_iterations", s.newton_iterations},
                     {"residual", s.residual}, {"note", s.note}});
  json its = json::array();
  for (const auto& i : r.iterates)
    its.push_back({{"t", i.t},
                   {"iteration", i.iteration},
                   {"residual", i.residual},
                   {"step", i.step},
                   {"krylov_iterations", i.krylov_iterations},
                   {"min_margin", i.min_margin},
                   {"symbol_min", i.symbol_min},
                   {"symbol_max", i.symbol_max},
                   {"c2_sup", i.c2_sup},
                   {"u_min", i.u_min},
                   {"u_max", i.u_max}});
  return {{"converged", r.converged},
          {"message", r.message},
          {"final_residual", r.final_residual},
          {"min_margin", r.iterates.empty() ? 0.0 : r.min_margin()},
          {"min_symbol_eigenvalue", r.iterates.empty() ? 0.0 : r.min_symbol()},
          {"max_c2", r.max_c2()},
          {"homotopy", steps},
          {"iterates", its}};
}

json to_json(const UniquenessReport& r) {
  json reps = json::array();
  for (const auto& s : r.reports) reps.push_back(to_json(s));
  return {{"runs", r.solutions.size()},
          {"max_pairwise_diff", r.max_pairwise_diff},
          {"tolerance", r.tolerance},
          {"passed", r.passed},
          {"reports", reps}};
}

json to_json(const CovarianceReport& r) {
  return {{"s", r.s}, {"shift", r.shift}, {"residual", r.residual}, {"tolerance", r.tolerance}, {"passed", r.passed}};
}

json curvature_summary(const MetricField& g, const CurvaturePack& curv) {
  double rmin = std::numeric_limits<double>::infinity(), rmax = -rmin;
  double emin = rmin, emax = -rmin;
  Index negdef = 0;
  for (Index p = 0; p < g.grid().points(); ++p) {
    rmin = std::min(rmin, curv.scalar(p));
    rmax = std::max(rmax, curv.scalar(p));
    const Vec lam = point_eigen(curv.ricci.matrix(p), g.cholesky(p)).lambda;
    emin = std::min(emin, lam.minCoeff());
    emax = std::max(emax, lam.maxCoeff());
    if (lam.maxCoeff() < 0.0) ++negdef;
  }
  return {{"scalar_min", rmin},         {"scalar_max", rmax},
          {"ricci_eigen_min", emin},    {"ricci_eigen_max", emax},
          {"ricci_negative_points", negdef}, {"points", g.grid().points()}};
}

void write_trace_csv(const std::string& path, const SolveReport& r) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "t,iteration,residual,step,krylov_iterations,min_margin,symbol_min,symbol_max,c2_sup,u_min,u_max\n";
  out.precision(17);
  for (const auto& i : r.iterates)
    out << i.t << ',' << i.iteration << ',' << i.residual << ',' << i.step << ',' << i.krylov_iterations << ','
        << i.min_margin << ',' << i.symbol_min << ',' << i.symbol_max << ',' << i.c2_sup << ',' << i.u_min << ','
        << i.u_max << '\n';
}

}  // namespace confbend
