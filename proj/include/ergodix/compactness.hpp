#pragma once

// Orbit geometry in the ω-seminorm: separated sets and nets, return-time
// sets, the multi-correlation lower bound for positive observables and the
// Szemerédi average of a compact system on shifted windows.
//
// Every claim here is certified on a finite scan window only.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergodix/lattice.hpp"
#include "ergodix/systems.hpp"

namespace ergodix {

struct EpsilonNetCertificate {
  enum class Kind { separated_maximal, net };

  double epsilon = 0.0;
  Kind kind = Kind::separated_maximal;
  /// Group elements g_i with points τ_{g_i}(a), in scan order.
  std::vector<GroupElement> elements;
  std::vector<Observable> points;
  FolnerWindow scan_window;
  /// max over the scanned orbit of the distance to the nearest listed point.
  double covering_radius = 0.0;
  /// min pairwise distance among listed points (infinity for one point).
  double separation = 0.0;
};

/// Greedy maximal ε-separated subset of {τ_g(a) : g ∈ scan} in ‖·‖_ω, scanning
/// g in lexicographic order. The result is also an ε-net of the scanned orbit.
EpsilonNetCertificate separated_orbit_set(const System& sys, const Observable& a, double epsilon,
                                          const FolnerWindow& scan);

/// Re-checks a certificate against the scanned orbit: pairwise separation
/// >= ε and every orbit point within ε (separated) or within the stated kind.
bool verify_certificate(const System& sys, const Observable& a,
                        const EpsilonNetCertificate& cert);

struct ReturnSet {
  double epsilon = 0.0;
  std::vector<std::int64_t> exponents;
  FolnerWindow scan_window;
  std::vector<GroupElement> members;
  /// max_j ‖τ_{m_j g}(a) − a‖_ω for each member.
  std::vector<double> member_distances;
  /// ‖τ_{mg}(a) − a‖_ω <= |m| ‖τ_g(a) − a‖_ω checked for every member and
  /// exponent.
  bool chain_certificate = false;
  std::optional<std::vector<GroupElement>> gap_witness;

  MembershipSet as_membership() const;
};

/// All g in scan with max_j ‖τ_{m_j g}(a) − a‖_ω < ε.
ReturnSet return_set(const System& sys, const Observable& a, double epsilon,
                     const std::vector<std::int64_t>& exponents, const FolnerWindow& scan);

struct CorrelationBound {
  double value = 0.0;
  double bound = 0.0;
  bool holds = false;
  /// g meets the rescaled return condition ε / (‖a‖^{k+1} (k+1)) on a/‖a‖.
  bool in_return_set = false;
};

/// value = |ω(∏_j τ_{m_j g}(a))| against bound = ω(a^{k+1}) − ε, where k+1 is
/// the number of exponents. Requires a tracial state, a >= 0 (eigenvalues
/// >= −1e-10), ω(a) > 0 and 0 < ε < ω(a^{k+1}).
CorrelationBound correlation_lower_bound(const System& sys, const Observable& a,
                                         const std::vector<std::int64_t>& exponents,
                                         double epsilon, const GroupElement& g);

struct CompactSzemerediReport {
  double epsilon = 0.0;
  /// Threshold the return set was built with, applied to a/‖a‖.
  double return_threshold = 0.0;
  std::vector<std::int64_t> exponents;
  FolnerWindow scan_window;
  std::vector<GroupElement> e_members;
  std::vector<GroupElement> candidates;
  struct WindowResult {
    std::int64_t n = 0;
    GroupElement shift;
    double e_density = 0.0;
    double average = 0.0;
  };
  std::vector<WindowResult> per_window;
  double tail_min = 0.0;
  std::string scope = "certified on scan window only";
};

/// Averages of |ω(a ∏_{j>=1} τ_{m_j g}(a))| over Λ_n + c_n, where c_n is the
/// candidate shift that puts the most of the return set E into the window.
/// ε = ω(a^{k+1})/2 and E uses the threshold ε / (‖a‖^{k+1} (k+1)) on a/‖a‖.
/// The tail minimum is over the last quarter of the schedule. Without
/// candidates, boxes {−s..s}^q grow until E meets every translate on the
/// scan window.
CompactSzemerediReport szemeredi_average_compact(
    const System& sys, const Observable& a, const std::vector<std::int64_t>& exponents,
    const WindowSchedule& windows,
    const std::optional<std::vector<GroupElement>>& candidates = std::nullopt);

}  // namespace ergodix
