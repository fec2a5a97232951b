#pragma once

// Van der Corput harness for bounded C^D-valued sequences on Z^q: the
// averaging inequalities behind the lemma, and a report that tests whether
// vanishing autocorrelations predict vanishing averages on concrete data.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ergodix/lattice.hpp"
#include "ergodix/operator.hpp"

namespace ergodix {

/// A bounded map g ↦ f(g) ∈ C^D. The declared bound is checked on every
/// evaluation.
class VectorSequence {
 public:
  using Map = std::function<Vector(const GroupElement&)>;

  VectorSequence(std::size_t dim, double bound, Map map, std::string label = "custom");

  std::size_t dim() const { return dim_; }
  double bound() const { return bound_; }
  const std::string& label() const { return label_; }

  Vector operator()(const GroupElement& g) const;

 private:
  std::size_t dim_;
  double bound_;
  Map map_;
  std::string label_;
};

VectorSequence constant_sequence(Vector v);
/// (−1)^{g_1 + ... + g_q} v.
VectorSequence alternating_sequence(Vector v);
/// e^{2πi α (g_1 + ... + g_q)} v.
VectorSequence linear_phase_sequence(double alpha, Vector v);
/// e^{2πi α (g_1² + ... + g_q²)} v.
VectorSequence weyl_quadratic_sequence(double alpha, Vector v);

/// (1/|Λ|) Σ_{g∈Λ} f(g).
Vector average_vector(const VectorSequence& f, const FolnerWindow& window);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// ‖Σ_Λ f‖² <= |Λ| Σ_Λ ‖f‖², with 1e-9 relative slack.
InequalityCheck check_norm_square_bound(const VectorSequence& f, const FolnerWindow& window);

/// ‖Σ_{g∈Λ2} Σ_{h∈Λ1} f(g+h)‖² <= |Λ2| Σ_{h1,h2∈Λ1} Σ_{g∈Λ2} ⟨f(g+h1), f(g+h2)⟩.
/// The right side is computed as the triple sum; an imaginary residue above
/// 1e-9 (relative) raises NumericalError.
InequalityCheck check_double_average_bound(const VectorSequence& f, const FolnerWindow& inner,
                                           const FolnerWindow& outer);

/// Σ_{h1,h2∈Λ} γ(h2 − h1) <= |Λ| Σ_{h∈Λ⁻¹Λ} γ(h) for γ >= 0.
InequalityCheck check_difference_set_bound(const std::function<double(const GroupElement&)>& gamma,
                                           const FolnerWindow& window);

struct AveragingGap {
  double gap = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// ‖avg_{Λm} f − (1/|Λm||Λn|) Σ_{g∈Λm} Σ_{h∈Λn} f(g+h)‖ against the bound
/// B · max_{h∈Λn} folner_defect(Λm, h).
AveragingGap averaging_gap(const VectorSequence& f, const FolnerWindow& outer,
                           const FolnerWindow& inner);

struct VdcReport {
  struct Gamma {
    GroupElement h;
    Complex value;
  };
  struct Point {
    std::int64_t n = 0;
    double value = 0.0;
  };
  /// Index of the window γ_h was estimated on.
  std::int64_t gamma_window = 0;
  std::vector<Gamma> gamma;
  /// (1/|Λn|) Σ_{h∈Λn⁻¹Λn} |γ_h|, the sufficient statistic.
  std::vector<Point> difference_set_statistic;
  /// |(1/|Λn|²) Σ_{h1,h2∈Λn} γ_{h2−h1}|, the double average itself.
  std::vector<Point> double_average;
  /// ‖avg_{Λn} f‖.
  std::vector<Point> averages;
  double tolerance = 0.05;
  bool hypothesis_satisfied = false;
  bool averages_vanish = false;
  std::string label;
};

/// γ_h = (1/|Λ_N|) Σ_{g∈Λ_N} ⟨f(g), f(g+h)⟩ on the largest window Λ_N for all
/// h in the difference sets of the schedule, then the per-window statistics.
/// A quantity counts as vanishing when its value at the last window is below
/// `tolerance`.
VdcReport van_der_corput_report(const VectorSequence& f, const WindowSchedule& windows,
                                double tolerance = 0.05);

}  // namespace ergodix
