#pragma once

// Exactly computable F_N-trees behind a common length-function interface.

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "dlam/automorphism.hpp"
#include "dlam/length.hpp"
#include "dlam/word.hpp"

namespace dlam {

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TreeModel {
 public:
  virtual ~TreeModel() = default;

  virtual const Basis& basis() const = 0;
  virtual std::string id() const = 0;
  /// True when lengths are exact rationals.
  virtual bool exact() const = 0;

  /// ‖w‖_T.
  virtual Length translation_length(const CyclicWord& w) const = 0;
  /// d(P, wP) for the model's basepoint P.
  virtual Length displacement(const Word& w) const = 0;
  /// Σ_x d(P, xP), an upper bound for the backtracking constant at P.
  virtual Length bbt_bound() const;

  virtual nlohmann::json describe() const = 0;

  /// ‖w‖_T for a nonempty reduced word, through its cyclic core.
  Length translation_length(const Word& w) const;
};

using ModelPtr = std::shared_ptr<const TreeModel>;

/// A finite graph with nonnegative rational edge lengths and a marking
/// F(A) → π₁(Γ, base). Zero-length edges are collapsed in the universal cover.
class MarkedMetricGraph : public TreeModel {
 public:
  struct Edge {
    std::string id;
    int from = 0;
    int to = 0;
    Rational length{1};
  };

  /// Marking paths use edge letters: edge i is i+1, traversed backwards -(i+1).
  MarkedMetricGraph(Basis basis, std::vector<std::string> vertices, std::vector<Edge> edges,
                    std::vector<std::vector<Letter>> marking, int base, std::string name = "graph");

  /// The rose with one petal per basis letter, petals named after the letters.
  static MarkedMetricGraph rose(const Basis& basis, const std::vector<Rational>& lengths, std::string name = "rose");

  const Basis& basis() const override { return basis_; }
  std::string id() const override { return name_; }
  bool exact() const override { return true; }
  Length translation_length(const CyclicWord& w) const override;
  Length displacement(const Word& w) const override;
  nlohmann::json describe() const override;
  using TreeModel::translation_length;

  const std::vector<std::string>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<std::vector<Letter>>& marking() const noexcept { return marking_; }
  int base() const noexcept { return base_; }
  int edge_index(std::string_view id) const;

  /// Ids of zero-length edges: the subgraph collapsed to points in the tree.
  std::vector<std::string> zero_length_edges() const;

  /// Reduced edge path of the marking image of w.
  std::vector<Letter> edge_path(const Word& w) const;

 private:
  Rational path_length(std::span<const Letter> path) const;

  Basis basis_;
  std::string name_;
  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Letter>> marking_;
  int base_ = 0;
};

/// Same graph with the given edges set to length zero.
MarkedMetricGraph contract(const MarkedMetricGraph& graph, const std::set<std::string>& edges);

/// True when the words generate the free group of rank `rank` (Stallings folding).
bool generates_free_group(const std::vector<std::vector<Letter>>& words, int rank);

/// Bass–Serre tree of F(A) = <S1> *_<b> <S2> with one edge orbit of length ℓ_e.
/// The basepoint is the vertex stabilized by the basepoint side.
class SplittingTree : public TreeModel {
 public:
  SplittingTree(Basis basis, const std::string& side1, const std::string& side2, const std::string& shared,
                Rational edge_length, int basepoint_side, std::string name = "splitting");

  const Basis& basis() const override { return basis_; }
  std::string id() const override { return name_; }
  bool exact() const override { return true; }
  Length translation_length(const CyclicWord& w) const override;
  Length displacement(const Word& w) const override;
  nlohmann::json describe() const override;
  using TreeModel::translation_length;

  /// 0 for the shared letter, otherwise 1 or 2.
  int side(Letter x) const { return side_.at(static_cast<std::size_t>(generator_index(x))); }
  Letter shared() const noexcept { return shared_; }
  const Rational& edge_length() const noexcept { return edge_length_; }
  int basepoint_side() const noexcept { return basepoint_side_; }

  /// Copy with the edge length replaced.
  SplittingTree rescaled(Rational edge_length) const;

 private:
  Basis basis_;
  std::string name_;
  std::vector<int> side_;
  Letter shared_ = 0;
  Rational edge_length_{1};
  int basepoint_side_ = 1;
};

/// T·α: ‖w‖ = ‖α(w)‖_T and d(P, wP) = d_T(P, α(w)P).
class PullbackTree : public TreeModel {
 public:
  PullbackTree(ModelPtr base, Automorphism alpha);

  const Basis& basis() const override { return base_->basis(); }
  std::string id() const override;
  bool exact() const override { return base_->exact(); }
  Length translation_length(const CyclicWord& w) const override;
  Length displacement(const Word& w) const override;
  nlohmann::json describe() const override;
  using TreeModel::translation_length;

  const TreeModel& base() const noexcept { return *base_; }
  const Automorphism& automorphism() const noexcept { return alpha_; }

 private:
  ModelPtr base_;
  Automorphism alpha_;
};

ModelPtr pullback(ModelPtr base, const Automorphism& alpha);

}  // namespace dlam
