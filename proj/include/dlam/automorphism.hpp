#pragma once

// Automorphisms of F_N given by generator images, and Cooper-style
// cancellation bounds for rewriting words between bases.

#include <optional>
#include <string>
#include <vector>

#include "dlam/word.hpp"

namespace dlam {

class BasisMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Automorphism {
 public:
  /// Validates image words against the target basis and, when inverse images are
  /// given, that both composites are the identity on generators.
  Automorphism(Basis source, Basis target, std::vector<Word> images,
               std::optional<std::vector<Word>> inverse_images = std::nullopt);

  static Automorphism identity(const Basis& basis);

  const Basis& source() const noexcept { return source_; }
  const Basis& target() const noexcept { return target_; }
  const std::vector<Word>& images() const noexcept { return images_; }
  const std::optional<std::vector<Word>>& inverse_images() const noexcept { return inverse_images_; }
  bool invertible() const noexcept { return inverse_images_.has_value(); }

  const Word& image(Letter x) const { return images_.at(static_cast<std::size_t>(generator_index(x))); }

  Word apply(const Word& w) const;
  Ray apply(const Ray& r) const;
  Automorphism inverse() const;
  Automorphism power(int k) const;

  /// Σ_x |α(x)|.
  std::size_t image_volume() const;
  std::size_t max_image_length() const;
  /// True when no image contains an inverse letter.
  bool is_positive() const;

  /// Stable textual identity used for cache keys.
  std::string canonical_text() const;

  bool operator==(const Automorphism& other) const;

 private:
  Basis source_;
  Basis target_;
  std::vector<Word> images_;
  std::optional<std::vector<Word>> inverse_images_;
};

/// outer ∘ inner: x ↦ outer(inner(x)).
Automorphism compose(const Automorphism& outer, const Automorphism& inner);

struct CancellationBound {
  enum class Kind { UpperBound, ExactUpToDepth };
  std::size_t value = 0;
  Kind kind = Kind::UpperBound;
  std::size_t depth_checked = 0;
  /// Σ|α(x)|, always sound.
  std::size_t cheap_value = 0;
  /// A pair (u, v) realizing the value at the certified depth, if any.
  std::optional<std::pair<Word, Word>> witness;
};

/// Largest cancellation in reduce(α(u)·α(v)) over reduced products u·v with
/// |u|, |v| <= depth, found by exhaustive search. Depth 0 returns the cheap bound.
CancellationBound cancellation_bound(const Automorphism& alpha, std::size_t depth, int jobs = 1);

/// Re-runs the search on the certificate's depth and reports whether any pair exceeds it.
bool verify_cancellation_bound(const Automorphism& alpha, const CancellationBound& bound);

}  // namespace dlam
