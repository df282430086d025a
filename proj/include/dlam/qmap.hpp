#pragma once

// L¹ membership of eventually periodic rays, symbolic Q-points on the exact
// models and the Q-relation on leaves.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dlam/lamination.hpp"
#include "dlam/length.hpp"
#include "dlam/tree_model.hpp"
#include "dlam/word.hpp"

namespace dlam {

struct L1Verdict {
  bool member = false;
  bool exact = true;
  /// Members: upper bound on sup_k d(P, X_k P).
  std::optional<Length> sup_displacement;
  /// Non-members: d(X_k P, X_l P) with k = |prefix|, l = k + 2|period|, which is at
  /// least twice the period's translation length.
  struct Divergence {
    std::size_t k = 0;
    std::size_t l = 0;
    Length distance;
    Length period_length;
  };
  std::optional<Divergence> divergence;
};

/// Member iff the period is elliptic. Limit trees use ‖v‖ < 10·tol·bbt.
L1Verdict l1_test(const Ray& r, const TreeModel& T);

/// Re-evaluates the witness of a verdict.
bool verify_l1(const L1Verdict& verdict, const Ray& r, const TreeModel& T);

/// g·p where p is the projection of the base point to Fix(v), ‖v‖ = 0.
struct QPoint {
  Word translate;
  Word elliptic;
  std::string model;
  bool operator==(const QPoint& other) const = default;
};

/// Prefix and period of the normalized ray. Exact models and members only.
QPoint q_point(const Ray& r, const TreeModel& T);

/// d(Q(p), Q(q)), from max over i, j in {0,1} of d(P, v^{-i} g^{-1} h w^j P) - r - s.
Length q_distance(const QPoint& p, const QPoint& q, const TreeModel& T);
bool q_equal(const QPoint& p, const QPoint& q, const TreeModel& T);

/// d(hP, Q(p)).
Length q_distance_to_orbit(const QPoint& p, const Word& h, const TreeModel& T);

struct QPairVerdict {
  bool pass = false;
  bool exact = true;
};

/// Exact models: both rays in L¹ with equal Q-points. Limit trees need `language`
/// and test that the leaf's central factors lie in it.
QPairVerdict q_pair_test(const Leaf& leaf, const TreeModel& T, const LaminaryLanguage* language = nullptr);

struct TrapReport {
  Length bound;
  std::vector<Length> distances;
  std::size_t k_begin = 0;
  /// First k from which d(X_k P, Q) <= bound holds through the end of the range.
  std::optional<std::size_t> holds_from;
  double max_ratio = 0.0;
  bool passed() const { return holds_from.has_value(); }
};

/// d(X_k P, Q(X)) <= 3·bbt for k in [k_begin, k_end].
TrapReport q_trap_check(const Ray& r, const TreeModel& T, std::size_t k_begin, std::size_t k_end);

/// Rays grouped by Q-point; classes of size one are dropped.
std::vector<std::vector<Ray>> q_classes(const std::vector<Ray>& rays, const TreeModel& T, int jobs = 1);

/// Factors of length <= depth of the central windows of all leaves (X, X') with X != X'
/// in one Q-class.
LaminaryLanguage q_leaf_language(const Basis& basis, const std::vector<std::vector<Ray>>& classes, std::size_t depth,
                                 int jobs = 1);

}  // namespace dlam
