#pragma once

// The lattice group Z^q, its integer homomorphisms, finite averaging windows
// and the density bookkeeping built on top of them.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ergodix {

/// A point of Z^q. Addition is componentwise, the identity is the zero vector.
class GroupElement {
 public:
  GroupElement() = default;
  explicit GroupElement(std::vector<std::int64_t> coords) : coords_(std::move(coords)) {}
  GroupElement(std::initializer_list<std::int64_t> coords) : coords_(coords) {}

  static GroupElement zero(std::size_t q) { return GroupElement(std::vector<std::int64_t>(q, 0)); }
  static GroupElement unit(std::size_t q, std::size_t axis);

  std::size_t rank() const { return coords_.size(); }
  std::int64_t operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<std::int64_t>& coords() const { return coords_; }
  bool is_zero() const;

  GroupElement operator+(const GroupElement& other) const;
  GroupElement operator-(const GroupElement& other) const;
  GroupElement operator-() const;
  GroupElement operator*(std::int64_t m) const;

  /// Lexicographic order; used for canonical enumeration of windows.
  auto operator<=>(const GroupElement&) const = default;
  bool operator==(const GroupElement&) const = default;

  std::string to_string() const;

 private:
  std::vector<std::int64_t> coords_;
};

/// Group homomorphism Z^q -> Z^q given by an integer matrix (row-major).
class Homomorphism {
 public:
  Homomorphism() = default;
  Homomorphism(std::size_t q, std::vector<std::int64_t> row_major);

  static Homomorphism scalar(std::size_t q, std::int64_t m);
  static Homomorphism identity(std::size_t q) { return scalar(q, 1); }
  static Homomorphism zero(std::size_t q) { return scalar(q, 0); }

  std::size_t rank() const { return q_; }
  std::int64_t entry(std::size_t row, std::size_t col) const { return entries_[row * q_ + col]; }
  bool is_zero() const;
  /// Returns m when the matrix is m times the identity.
  std::optional<std::int64_t> as_scalar() const;

  GroupElement apply(const GroupElement& g) const;
  GroupElement operator()(const GroupElement& g) const { return apply(g); }
  Homomorphism operator-(const Homomorphism& other) const;
  bool operator==(const Homomorphism&) const = default;

  std::string to_string() const;

 private:
  std::size_t q_ = 0;
  std::vector<std::int64_t> entries_;
};

/// Finite set of nonzero homomorphisms.
class HomSet {
 public:
  HomSet() = default;
  explicit HomSet(std::vector<Homomorphism> homs);

  const std::vector<Homomorphism>& homs() const { return homs_; }
  std::size_t size() const { return homs_.size(); }
  bool contains(const Homomorphism& h) const;
  /// True when the difference of any two distinct members is again a member.
  bool translational() const;

 private:
  std::vector<Homomorphism> homs_;
};

enum class WindowShape { box, custom };

/// A finite averaging window in Z^q. Elements are kept sorted and unique.
class FolnerWindow {
 public:
  FolnerWindow() = default;
  FolnerWindow(std::int64_t index, std::vector<GroupElement> elements,
               WindowShape shape = WindowShape::custom);

  std::int64_t index() const { return index_; }
  WindowShape shape() const { return shape_; }
  std::size_t size() const { return elements_.size(); }
  std::size_t rank() const { return elements_.front().rank(); }
  const std::vector<GroupElement>& elements() const { return elements_; }
  bool contains(const GroupElement& g) const;

  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

 private:
  std::int64_t index_ = 0;
  std::vector<GroupElement> elements_;
  WindowShape shape_ = WindowShape::custom;
};

using WindowSchedule = std::vector<FolnerWindow>;

/// {-n,...,n}^q.
FolnerWindow box_window(std::size_t q, std::int64_t n);
/// Box windows for n = n_min, n_min + stride, ..., <= n_max.
WindowSchedule box_schedule(std::size_t q, std::int64_t n_min, std::int64_t n_max,
                            std::int64_t stride = 1);
/// {-|m|n,...,|m|n}^q, the window dominating averages of f(m g) over box(q, n).
FolnerWindow dilated_box(std::size_t q, std::int64_t n, std::int64_t m);

/// Difference set {b - a : a, b in window}.
FolnerWindow inverse_product(const FolnerWindow& window);
/// |window^{-1} window| / |window|.
double tempelman_ratio(const FolnerWindow& window);
/// |window symmetric-difference (window + g)| / |window|.
double folner_defect(const FolnerWindow& window, const GroupElement& g);
FolnerWindow shift_window(const FolnerWindow& window, const GroupElement& g);

/// A subset of Z^q given by a membership test.
class MembershipSet {
 public:
  using Predicate = std::function<bool(const GroupElement&)>;

  MembershipSet(std::string description, Predicate predicate)
      : description_(std::move(description)), predicate_(std::move(predicate)) {}

  static MembershipSet all();
  static MembershipSet finite(std::vector<GroupElement> members);
  /// {g : every coordinate of g is congruent to one of `residues` mod `modulus`}.
  static MembershipSet residue(std::int64_t modulus, std::vector<std::int64_t> residues);
  /// {start + k step : k in Z}.
  static MembershipSet progression(GroupElement start, GroupElement step);
  /// Nonnegative perfect squares in Z (q = 1).
  static MembershipSet squares();
  MembershipSet complement() const;

  bool contains(const GroupElement& g) const { return predicate_(g); }
  bool operator()(const GroupElement& g) const { return predicate_(g); }
  const std::string& description() const { return description_; }

 private:
  std::string description_;
  Predicate predicate_;
};

struct DensityReport {
  double lower_density = 0.0;
  std::vector<std::pair<std::int64_t, double>> per_n_ratios;
};

/// |window ∩ E| / |window|.
double window_density(const MembershipSet& set, const FolnerWindow& window);

/// Per-window ratios and their minimum over windows with index >= tail_from
/// (all windows when tail_from is not given); the finite stand-in for liminf.
DensityReport lower_density(const MembershipSet& set, const WindowSchedule& windows,
                            std::optional<std::int64_t> tail_from = std::nullopt);

struct WitnessResult {
  bool accepted = false;
  std::vector<GroupElement> candidates;
  std::optional<GroupElement> failing;
};

/// Checks that E meets {g + c : c in candidates} for every g in scan.
WitnessResult relative_density_witness(const MembershipSet& set, const FolnerWindow& scan,
                                       const std::vector<GroupElement>& candidates);

struct ShiftChoice {
  std::size_t index = 0;
  GroupElement shift;
  double ratio = 0.0;
};

/// The candidate shift maximizing |(window + c) ∩ E|; ties go to the lowest index.
ShiftChoice best_shift_for_density(const FolnerWindow& window, const MembershipSet& set,
                                   const std::vector<GroupElement>& candidates);

}  // namespace ergodix
