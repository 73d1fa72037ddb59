#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "confbend/cone.hpp"
#include "confbend/curvature.hpp"

namespace confbend {

enum class BackgroundKind { flat, conformally_flat, warped, custom };

struct BackgroundSpec {
  BackgroundKind kind = BackgroundKind::flat;
  Grid grid;
  Expr phi;                   // conformally_flat: g = e^{2φ}δ
  double K = 3.0;             // warped: f = K sin x, h = −K cos x
  std::optional<Expr> f_gen;  // warped with explicit generators
  std::optional<Expr> h_gen;
  std::string path;           // custom: NFLD1 metric
  int order = 2;
};

/// Upper-triangle entries of dx² + e^{2f}dy² + e^{2h}dz² (n = 3).
std::vector<Expr> warped_entries(const Expr& f, const Expr& h);
std::vector<Expr> warped_entries(double K);
std::vector<Expr> conformally_flat_entries(int n, const Expr& phi);

MetricField make_background(const BackgroundSpec& spec);

enum class AdmissibilityClass { inadmissible, weak_with_strict_point, strict };
std::string to_string(AdmissibilityClass c);

struct Classification {
  AdmissibilityClass cls = AdmissibilityClass::inadmissible;
  double min_margin = 0.0;  // of λ(g⁻¹A^{τ,α}) over the grid
  double max_margin = 0.0;
  Index argmin = -1;
  Index argmax = -1;
  Index strict_points = 0;
};

/// Margins of λ(g⁻¹A) for a given tensor A (which must share g's grid).
Classification classify_tensor(const MetricField& g, const SymTensorField& A, int k, double weak_tol = 1e-8);
/// Classification of A^{τ,α}_g itself.
Classification classify(const MetricField& g, const EquationParams& params, double weak_tol = 1e-8);

struct BackgroundScanEntry {
  double K = 0.0;
  Classification cls;
};

struct BackgroundSearch {
  Grid grid;
  std::vector<double> K_values;
  AdmissibilityClass target = AdmissibilityClass::strict;
  int order = 2;
};

struct BackgroundMatch {
  MetricField g;
  double K = 0.0;
  Classification cls;
  std::vector<BackgroundScanEntry> scan;
};

class BackgroundSearchFailure : public std::runtime_error {
 public:
  BackgroundSearchFailure(const std::string& what, std::vector<BackgroundScanEntry> scan)
      : std::runtime_error(what), scan_(std::move(scan)) {}
  const std::vector<BackgroundScanEntry>& scan() const { return scan_; }

 private:
  std::vector<BackgroundScanEntry> scan_;
};

/// Scans the warped family over K and returns the first metric whose class
/// is at least the requested one.
BackgroundMatch find_admissible_background(const EquationParams& params, const BackgroundSearch& search);

/// Smooth compactly supported bump amplitude·exp(1 − 1/(1 − r²)), r = |x − p0|/radius (periodic distance).
ScalarField bump_field(const Grid& grid, const Vec& p0, double radius, double amplitude);

/// A = b(x)·g: weakly admissible for every Γ_k, strict where b > 0.
SymTensorField scalar_multiple(const MetricField& g, const ScalarField& b);

}  // namespace confbend
