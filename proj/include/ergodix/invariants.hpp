#pragma once

// Seeded randomized property suites. Each suite draws its own trials from the
// generator it is handed and counts the trials that violate the property.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ergodix/random.hpp"

namespace ergodix {

struct SuiteResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  /// Largest violation margin or residual seen (0 when nothing was measured).
  double worst = 0.0;
  std::string first_failure;
};

/// ‖Σ_Λ f‖² <= |Λ| Σ_Λ ‖f‖² for random tables f: Z -> C^D, D <= 8, n <= 8.
SuiteResult suite_norm_square(Rng& rng, std::size_t trials);
/// The double-average bound on random tables and pairs of boxes n <= 8.
SuiteResult suite_double_average(Rng& rng, std::size_t trials);
/// The difference-set bound for random γ >= 0 and random finite Λ ⊂ [−8, 8].
SuiteResult suite_difference_set(Rng& rng, std::size_t trials);
/// Product-system integrand equals |ω(a τ_g b)|² to 1e-10.
SuiteResult suite_product_system(Rng& rng, std::size_t trials);
/// τ_g is a *-automorphism and τ_g τ_h = τ_{g+h}, to 1e-10.
SuiteResult suite_automorphism(Rng& rng, std::size_t trials);
/// |ω(a*b)| <= ‖a‖_ω ‖b‖_ω.
SuiteResult suite_cauchy_schwarz(Rng& rng, std::size_t trials);
/// ‖τ_{mg}(a) − a‖_ω <= m ‖τ_g(a) − a‖_ω for m = 1..6.
SuiteResult suite_return_chain(Rng& rng, std::size_t trials);
/// Perturbing unitary factors changes |ω(∏)| by at most Σ ‖c_j − d_j‖_ω on
/// tracial systems, with telescope_decompose as the product-difference oracle.
SuiteResult suite_perturbation(Rng& rng, std::size_t trials);
/// ⟨K x, K y⟩ = ⟨x, y⟩ and K Ω = Ω on the GNS space.
SuiteResult suite_koopman_unitarity(Rng& rng, std::size_t trials);

/// Every suite, each with its own generator seeded from `seed` and the suite
/// name. `trials` overrides the per-suite defaults (1000 for the averaging
/// inequalities, 100 otherwise).
std::vector<SuiteResult> run_invariant_suites(std::uint64_t seed,
                                              const std::map<std::string, std::size_t>& trials = {});

const std::vector<std::string>& suite_names();

}  // namespace ergodix
