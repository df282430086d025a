#pragma once

// Reduced words, cyclic words, eventually periodic rays and leaves in a
// free group F(A) over a finite named basis.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dlam {

/// A letter of A^{±1}: generator i (0-based) is encoded as i+1, its inverse as -(i+1).
using Letter = int;

inline constexpr Letter inverse(Letter x) noexcept { return -x; }
inline constexpr int generator_index(Letter x) noexcept { return (x > 0 ? x : -x) - 1; }

/// Position of a letter in the fixed total order a < a' < b < b' < ...
inline constexpr int letter_key(Letter x) noexcept { return 2 * generator_index(x) + (x < 0 ? 1 : 0); }
inline constexpr Letter letter_from_key(int key) noexcept {
  return (key % 2 == 0) ? key / 2 + 1 : -(key / 2 + 1);
}

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Word;

class Basis {
 public:
  Basis() = default;
  Basis(std::string name, std::vector<std::string> letters);

  /// "abc" gives single-character letters; "x1 x2 x3" or "x1,x2" gives named letters.
  static Basis parse(std::string_view spec);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& letters() const noexcept { return letters_; }
  int rank() const noexcept { return static_cast<int>(letters_.size()); }
  bool contains(Letter x) const noexcept { return x != 0 && generator_index(x) < rank(); }

  Letter letter(std::string_view symbol) const;
  std::string format(Letter x) const;

  /// Parses the text grammar (tokens, trailing ' or ^-1 for inverses, ^n for powers)
  /// into an unreduced letter sequence.
  std::vector<Letter> parse_letters(std::string_view text) const;
  Word parse_word(std::string_view text) const;
  std::string format(const Word& w) const;
  std::string format(std::span<const Letter> letters) const;

  /// Number of letters of A^{±1}.
  int alphabet_size() const noexcept { return 2 * rank(); }

  bool operator==(const Basis& other) const { return letters_ == other.letters_; }

 private:
  std::string name_;
  std::vector<std::string> letters_;
  bool single_char_ = true;
};

std::vector<Letter> free_reduce(std::span<const Letter> letters);

/// An element of F(A) in reduced normal form.
class Word {
 public:
  Word() = default;
  /// Reduces the given letter sequence.
  explicit Word(std::span<const Letter> letters);
  Word(std::initializer_list<Letter> letters);

  static Word from_reduced(std::vector<Letter> letters);
  static Word letter(Letter x) { return from_reduced({x}); }

  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  Letter operator[](std::size_t i) const noexcept { return letters_[i]; }
  Letter front() const { return letters_.front(); }
  Letter back() const { return letters_.back(); }
  const std::vector<Letter>& letters() const noexcept { return letters_; }
  auto begin() const noexcept { return letters_.begin(); }
  auto end() const noexcept { return letters_.end(); }

  Word inverse() const;
  Word power(int n) const;
  Word prefix(std::size_t n) const;
  Word suffix(std::size_t n) const;
  Word factor(std::size_t pos, std::size_t len) const;
  bool has_factor(const Word& u) const;
  bool is_cyclically_reduced() const noexcept;
  int max_generator() const noexcept;

  friend Word operator*(const Word& u, const Word& v);

  bool operator==(const Word& other) const = default;
  /// Shortlex order over the fixed letter order.
  std::strong_ordering operator<=>(const Word& other) const;

 private:
  std::vector<Letter> letters_;
};

/// Number of letters cancelled when forming reduce(u·v).
std::size_t cancellation(const Word& u, const Word& v);

/// Removes min(k, |w|/2) letters from both ends; empty when |w| <= 2k.
Word chop(const Word& w, std::size_t k);

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept;
};

/// Conjugacy class of a nontrivial element, stored as the least rotation of its
/// cyclically reduced representative.
class CyclicWord {
 public:
  CyclicWord() = default;
  /// Takes the cyclic core of any nonempty reduced word and rotates it canonically.
  explicit CyclicWord(const Word& w);

  const Word& word() const noexcept { return word_; }
  std::size_t size() const noexcept { return word_.size(); }
  bool empty() const noexcept { return word_.empty(); }
  CyclicWord inverse() const { return CyclicWord(word_.inverse()); }
  /// Smallest root r with r^k equal to this word as a cyclic word.
  CyclicWord root() const;

  bool operator==(const CyclicWord& other) const = default;
  auto operator<=>(const CyclicWord& other) const { return word_ <=> other.word_; }

 private:
  Word word_;
};

Word least_rotation(const Word& cyclically_reduced);
bool is_canonical_cyclic(std::span<const Letter> letters);

/// w = conjugator · core · conjugator^{-1} with the core cyclically reduced.
struct ConjugacyDecomposition {
  Word conjugator;
  Word core;
};

ConjugacyDecomposition cyclic_decompose(const Word& w);

/// Shortest u with w = u^k; w must be nonempty.
Word primitive_root(const Word& w);

using WordSet = std::set<Word>;

/// All factors of w of length <= depth, together with their inverses.
WordSet subwords(const Word& w, std::size_t depth);

/// Factors of length <= depth of the biinfinite word ...vvv..., with inverses.
/// The period must be cyclically reduced.
WordSet periodic_factors(const Word& period, std::size_t depth);

/// Eventually periodic infinite reduced word prefix · period^∞, kept in the
/// unique form with shortest prefix, primitive period and no cancellation.
class Ray {
 public:
  Ray() = default;
  Ray(const Word& prefix, const Word& period);

  const Word& prefix() const noexcept { return prefix_; }
  const Word& period() const noexcept { return period_; }

  Letter at(std::size_t i) const noexcept;
  /// The first n letters.
  Word initial(std::size_t n) const;
  /// The ray with its first n letters removed.
  Ray tail(std::size_t n) const;
  /// Length of the longest common prefix; equal rays throw.
  std::size_t common_prefix(const Ray& other) const;

  bool operator==(const Ray& other) const = default;
  std::strong_ordering operator<=>(const Ray& other) const;

 private:
  Word prefix_;
  Word period_;
};

struct RayHash {
  std::size_t operator()(const Ray& r) const noexcept;
};

/// Recurrent factors of a ray up to the given length: its periodic tail's factors.
WordSet recurrent_factors(const Ray& r, std::size_t depth);

class InvalidLeaf : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Biinfinite reduced word X^{-1}·X' after cancelling the common prefix of X and X'.
/// Index i < 0 reads the inverted left tail, i >= 0 reads the right tail.
class BiinfiniteWord {
 public:
  BiinfiniteWord(Ray left_tail, Ray right_tail);

  Letter at(long i) const noexcept;
  Word window(long from, std::size_t length) const;
  /// The 2k letters around the junction.
  Word central(std::size_t k) const { return window(-static_cast<long>(k), 2 * k); }
  /// Every factor of length <= depth, with inverses.
  WordSet factors(std::size_t depth) const;

  const Ray& left_tail() const noexcept { return left_; }
  const Ray& right_tail() const noexcept { return right_; }

 private:
  Ray left_;
  Ray right_;
};

/// An ordered pair of distinct rays, a point of ∂²F.
class Leaf {
 public:
  Leaf(Ray left, Ray right);

  const Ray& left() const noexcept { return left_; }
  const Ray& right() const noexcept { return right_; }
  Leaf flip() const { return Leaf(right_, left_); }
  /// Translate both rays by g.
  Leaf translate(const Word& g) const;

  bool operator==(const Leaf& other) const = default;
  auto operator<=>(const Leaf& other) const = default;

 private:
  Ray left_;
  Ray right_;
};

BiinfiniteWord rho(const Leaf& leaf);

/// g·r as a normalized ray.
Ray translate(const Word& g, const Ray& r);

}  // namespace dlam
