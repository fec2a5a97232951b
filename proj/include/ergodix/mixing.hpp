#pragma once

// Window-averaged statistics: ergodic averages, weak-mixing defects,
// asymptotic abelianness, the higher-order multi-correlation defect and the
// autocorrelation sequence of products.
//
// All averages are (1/|Λ_n|) times a compensated, index-ordered sum; the
// per-element integrands may be computed in parallel without changing a bit
// of the result.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ergodix/lattice.hpp"
#include "ergodix/systems.hpp"

namespace ergodix {

enum class Verdict { decaying, non_decaying, inconclusive };

std::string to_string(Verdict v);

/// Finite-horizon decay criterion. With v_0 the first window's value and T
/// the last `tail_fraction` of the windows, the statistic is decaying when
/// max_T v <= relative_threshold * v_0 and the last value is below that
/// threshold (or everything is exactly zero). It is non-decaying when
/// min_T v >= v_0 / 2, and inconclusive otherwise.
struct DecayRule {
  double relative_threshold = 0.05;
  double tail_fraction = 0.25;
};

struct StatisticPoint {
  std::int64_t n = 0;
  std::size_t window_size = 0;
  double value = 0.0;
};

struct MixingStatistic {
  std::vector<StatisticPoint> per_window;
  double verdict_threshold = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

MixingStatistic classify(std::vector<StatisticPoint> points, const DecayRule& rule = {});

/// (1/|Λ|) Σ_{g∈Λ} fn(g) for every window of the schedule. The integrand is
/// evaluated once per distinct group element.
std::vector<double> window_means(const WindowSchedule& windows,
                                 const std::function<double(const GroupElement&)>& fn);
std::vector<Complex> window_means_complex(const WindowSchedule& windows,
                                          const std::function<Complex(const GroupElement&)>& fn);

struct ErgodicAverage {
  struct Point {
    std::int64_t n = 0;
    std::size_t window_size = 0;
    Complex value;
  };
  std::vector<Point> per_window;
  /// ω(a) ω(b), the value an ergodic system's averages approach.
  Complex reference;
};

/// (1/|Λ_n|) Σ_g ω(a τ_{φ(g)}(b)).
ErgodicAverage ergodic_average(const System& sys, const Observable& a, const Observable& b,
                               const Homomorphism& hom, const WindowSchedule& windows);

/// Mean of |ω(a τ_{φ(g)}(b)) − ω(a)ω(b)|.
MixingStatistic weak_mixing_defect(const System& sys, const Observable& a, const Observable& b,
                                   const Homomorphism& hom, const WindowSchedule& windows,
                                   const DecayRule& rule = {});
/// Mean of |ω(a τ_{φ(g)}(b)) − ω(a)ω(b)|².
MixingStatistic square_defect(const System& sys, const Observable& a, const Observable& b,
                              const Homomorphism& hom, const WindowSchedule& windows,
                              const DecayRule& rule = {});
/// Mean of ‖[a, τ_{φ(g)}(b)]‖.
MixingStatistic asymptotic_abelianness(const System& sys, const Observable& a,
                                       const Observable& b, const Homomorphism& hom,
                                       const WindowSchedule& windows, const DecayRule& rule = {});

/// Observables a_0..a_k and distinct homomorphisms φ_1..φ_k; φ_0 is the zero
/// map.
struct HigherOrderSpec {
  std::vector<Observable> observables;
  std::vector<Homomorphism> homs;

  std::size_t order() const { return homs.size(); }
  /// Throws unless there are k+1 observables, k >= 1 distinct homomorphisms
  /// of the system's rank.
  void validate(const System& sys) const;
};

/// ω(∏_{j=0}^k τ_{φ_j(g)}(a_j)).
Complex multi_correlation(const System& sys, const HigherOrderSpec& spec, const GroupElement& g);

/// Mean of |ω(∏_{j=0}^k τ_{φ_j(g)}(a_j)) − ∏_j ω(a_j)|.
MixingStatistic higher_order_defect(const System& sys, const HigherOrderSpec& spec,
                                    const WindowSchedule& windows, const DecayRule& rule = {});

/// Boundary constant for the product-state lattice: the integrand vanishes
/// unless two shifted supports overlap, and is otherwise bounded by
/// ∏‖a_j‖ + ∏|ω(a_j)|. So the defect on Λ is at most c/|Λ| with
/// c = collisions(Λ) · per_term_bound.
struct CollisionBound {
  std::vector<GroupElement> collisions;
  double per_term_bound = 0.0;
  double constant = 0.0;
};

CollisionBound collision_bound(const System& sys, const HigherOrderSpec& spec,
                               const FolnerWindow& window);

struct GammaEntry {
  GroupElement h;
  Complex empirical;
  Complex closed_form;
  double difference = 0.0;
  /// Lattice backend only: g in the window where the supports of different
  /// factors of P_g, P_{g+h} meet, and the bound 2(∏‖a_j‖ + |κ|)² · count / |Λ|
  /// on `difference` that those terms allow.
  std::size_t exceptional = 0;
  std::optional<double> boundary_bound;
};

/// For u_g = ι(∏_{j=1}^k τ_{φ_j(g)}(a_j)) − κΩ with κ = ∏_{j≥1} ω(a_j):
/// the window mean of ⟨u_g, u_{g+h}⟩ over `window` next to the closed form
/// ∏_j ω(a_j* τ_{φ_j(h)}(a_j)) − |κ|². a_0 is not used. When `h_range` is
/// not given it defaults to the difference set of `window`.
std::vector<GammaEntry> gamma_sequence(const System& sys, const HigherOrderSpec& spec,
                                       const FolnerWindow& window,
                                       const std::optional<FolnerWindow>& h_range = std::nullopt);

/// Closed form alone: ∏_{j≥1} ω(a_j* τ_{φ_j(h)}(a_j)) − |κ|².
Complex gamma_closed_form(const System& sys, const HigherOrderSpec& spec, const GroupElement& h);

struct DensityLimitReport {
  std::vector<StatisticPoint> averages;
  struct Level {
    double epsilon = 0.0;
    std::vector<StatisticPoint> densities;
    bool vanishes = false;
  };
  std::vector<Level> levels;
  bool average_vanishes = false;
  bool densities_vanish = false;
  /// The two finite-horizon verdicts agree.
  bool consistent = false;
};

/// Compares window averages of a bounded f >= 0 with the densities of
/// {f >= ε}. A sequence "vanishes" when its values over the last quarter of
/// the schedule stay at or below `tolerance`.
DensityLimitReport density_limit_check(const std::function<double(const GroupElement&)>& f,
                                       const WindowSchedule& windows,
                                       const std::vector<double>& epsilons,
                                       double tolerance = 0.05);

}  // namespace ergodix
