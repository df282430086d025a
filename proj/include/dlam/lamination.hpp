#pragma once

// Depth-bounded laminary languages: rational laminations, Ω_ε enumeration,
// dual-lamination languages, recurrent languages of rays, and the Out(F_N) action.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "dlam/automorphism.hpp"
#include "dlam/length.hpp"
#include "dlam/tree_model.hpp"
#include "dlam/word.hpp"

namespace dlam {

struct ClosureReport {
  bool inverse_closed = true;
  bool factor_closed = true;
  bool extendable = true;
  /// A few offending words, for messages.
  std::vector<Word> witnesses;
  bool ok() const { return inverse_closed && factor_closed && extendable; }
};

/// Checks inverse closure, factor closure and one-letter extension on both sides
/// for words shorter than depth.
ClosureReport check_laminary(const WordSet& words, std::size_t depth, int rank);

/// Adds inverses and factors, then removes words of length < depth that cannot be
/// extended on both sides, until nothing changes.
WordSet laminary_closure(WordSet words, std::size_t depth, int rank);

class LaminaryLanguage {
 public:
  LaminaryLanguage(Basis basis, std::size_t depth, WordSet words, nlohmann::json provenance = {});

  const Basis& basis() const noexcept { return basis_; }
  std::size_t depth() const noexcept { return depth_; }
  const WordSet& words() const noexcept { return words_; }
  const nlohmann::json& provenance() const noexcept { return provenance_; }
  nlohmann::json& provenance() noexcept { return provenance_; }
  const std::set<std::string>& flags() const noexcept { return flags_; }
  void flag(const std::string& f) { flags_.insert(f); }

  bool contains(const Word& w) const { return words_.count(w) != 0; }
  bool operator==(const LaminaryLanguage& other) const { return words_ == other.words_; }
  bool subset_of(const LaminaryLanguage& other) const;
  /// Words of length <= d only.
  LaminaryLanguage truncate(std::size_t d) const;

 private:
  Basis basis_;
  std::size_t depth_;
  WordSet words_;
  nlohmann::json provenance_;
  std::set<std::string> flags_;
};

struct LanguageDiff {
  bool equal = true;
  WordSet left_minus_right;
  WordSet right_minus_left;
};

LanguageDiff compare(const LaminaryLanguage& left, const LaminaryLanguage& right);

/// Factors of w^∞.
LaminaryLanguage rational_language(const Basis& basis, const CyclicWord& w, std::size_t depth);

struct OmegaSet {
  Threshold epsilon;
  std::size_t length_cap = 0;
  std::vector<CyclicWord> elements;
  /// Prefixes visited by the pruned search.
  std::size_t visited = 0;
  std::set<std::string> flags;
};

/// Canonical cyclic words w with |w| <= cap and ‖w‖_T < ε. Prefixes u are pruned
/// once d(P, uP) >= 2·bbt + ε, since every factor of such a w satisfies the reverse.
OmegaSet omega_enumerate(const TreeModel& T, const Threshold& epsilon, std::size_t length_cap, int jobs = 1);

LaminaryLanguage l_epsilon_language(const TreeModel& T, const Threshold& epsilon, std::size_t depth,
                                    std::size_t length_cap, int jobs = 1);
LaminaryLanguage l_epsilon_language(const Basis& basis, const OmegaSet& omega, std::size_t depth);

/// Intersection over a strictly decreasing ε schedule, flagged "unstabilized" unless
/// the last two steps agree.
LaminaryLanguage l_omega_language(const TreeModel& T, std::size_t depth, const std::vector<Threshold>& schedule,
                                  std::size_t length_cap, int jobs = 1);

/// (m/2, m/4, m/8) with m the smallest positive translation length over cyclic words
/// of length <= min(cap, 6) for exact models; bbt·(λ^{-4}, λ^{-6}, λ^{-8}) for limit trees.
std::vector<Threshold> default_schedule(const TreeModel& T, std::size_t length_cap);

/// Union of the recurrent languages of the rays.
LaminaryLanguage l_infinity_language(const Basis& basis, const std::vector<Ray>& rays, std::size_t depth);

/// Normalized rays with |prefix| <= prefix_cap and |period| <= period_cap, sorted.
std::vector<Ray> enumerate_rays(int rank, std::size_t prefix_cap, std::size_t period_cap);

/// All canonical cyclic words of length <= cap, in shortlex order.
std::vector<CyclicWord> enumerate_cyclic_words(int rank, std::size_t cap);

bool l1_infinity_member(const Ray& r, const LaminaryLanguage& L);

struct L1RayCertificate {
  enum class Regime { CyclicallyReduced, ConstantConjugator, IncreasingConjugator };
  Regime regime = Regime::CyclicallyReduced;
  std::vector<std::size_t> selected;
  std::vector<int> signs;
  std::vector<std::size_t> conjugator_lengths;
  /// Cancellation at each junction of consecutive selected words.
  std::vector<std::size_t> junction_cancellation;
  Word concatenation;
  bool total_length_ok = false;

  /// Every junction cancels at most the shorter conjugating part.
  bool junctions_ok() const;
};

std::string regime_name(L1RayCertificate::Regime r);

/// Picks a subsequence with constant or strictly increasing conjugators and signs so
/// that consecutive words cancel only inside their conjugating parts.
L1RayCertificate build_l1_ray(const std::vector<Word>& seeds);

/// Transitive, flip-closed closure: all ordered pairs of distinct rays in one component.
std::set<Leaf> diagonal_closure(const std::set<Leaf>& leaves);

/// α^{-1} of every word, chopped by chop_bound, factors re-closed at depth - chop_bound.
LaminaryLanguage act_on_language(const Automorphism& alpha, const LaminaryLanguage& L, std::size_t chop_bound);

}  // namespace dlam
