#pragma once

// Limit trees T_α of train-track automorphisms of the rose, evaluated by
// rescaled iteration λ^{-k} ℓ(α^k(w)).

#include <deque>
#include <optional>
#include <vector>

#include "dlam/tree_model.hpp"

namespace dlam {

using IntMatrix = std::vector<std::vector<std::int64_t>>;

struct PFData {
  double lambda = 0.0;
  /// Left eigenvector v M = λ v, positive, Σ v = 1.
  std::vector<double> v;
  double residual = 0.0;
};

/// M[i][j] = occurrences of letter i^{±1} in α(j).
IntMatrix transition_matrix(const Automorphism& alpha);

/// Some power of M is strictly positive (Wielandt bound on the exponent).
bool is_primitive(const IntMatrix& M);

/// Perron–Frobenius data by power iteration; throws ModelError if M is not primitive.
PFData pf_data(const IntMatrix& M);

struct TrainTrackSpec {
  Automorphism alpha;
  IntMatrix matrix;
  /// User certificate that α is a train-track map on the rose; positive automorphisms need none.
  bool certified = false;

  /// Recomputes the matrix, checks an explicit one if given, and checks primitivity.
  static TrainTrackSpec make(Automorphism alpha, std::optional<IntMatrix> explicit_matrix = std::nullopt,
                             bool certified = false);
};

struct LimitOptions {
  int k_max = 40;
  double tol = 1e-9;
  /// Σ of edge lengths; the eigenvector is rescaled to this total.
  double scale = 1.0;
};

class LimitTree : public TreeModel {
 public:
  LimitTree(TrainTrackSpec spec, LimitOptions options = {}, std::string name = "limit");

  const Basis& basis() const override { return spec_.alpha.source(); }
  std::string id() const override { return name_; }
  bool exact() const override { return false; }
  Length translation_length(const CyclicWord& w) const override;
  Length displacement(const Word& w) const override;
  Length bbt_bound() const override;
  nlohmann::json describe() const override;
  using TreeModel::translation_length;

  const TrainTrackSpec& spec() const noexcept { return spec_; }
  const PFData& pf() const noexcept { return pf_; }
  const LimitOptions& options() const noexcept { return options_; }
  double lambda() const noexcept { return pf_.lambda; }
  /// Edge length of generator i (rescaled eigenvector entry).
  double edge_length(int i) const { return pf_.v[static_cast<std::size_t>(i)] * options_.scale; }

  /// λ^{-k} ℓ(reduce α^k(w)), cyclically reduced when `cyclic`.
  double level_value(const Word& w, int k, bool cyclic) const;

  /// Sound lower bound on d(P, wP) from level k: the level value minus the
  /// cancellation still possible at later levels.
  double displacement_lower_bound(const Word& w, int k) const;

  /// Weighted bounded-cancellation constant per illegal turn used by the lower bound.
  double turn_cancellation() const noexcept { return turn_cancellation_; }

  /// Slack subtracted per illegal turn by the level-k lower bounds.
  double turn_slack(int k) const;

  /// Level values never increase with k, so level k brackets ‖w‖ from both sides.
  struct Bracket {
    double lower = 0.0;
    double upper = 0.0;
  };
  Bracket translation_bracket(const CyclicWord& w, int k) const;

 private:
  struct Tile {
    Letter letter;
    int level;
  };

 public:
  /// Level-k reduction of a word grown and shrunk one letter at a time. Keeps the
  /// stack height after each letter and the lowest height reached while adding it,
  /// so the level value of every suffix costs O(1).
  class PrefixWalker {
   public:
    PrefixWalker(const LimitTree& tree, int k);

    void push(Letter x);
    void pop();
    std::size_t size() const noexcept { return letters_.size(); }
    const std::vector<Letter>& letters() const noexcept { return letters_; }

    /// out[i] is a lower bound on d(P, u[i..n) P) for the current word u of length n.
    void suffix_lower_bounds(std::vector<double>& out) const;
    /// Lower bound on the translation length of the current word.
    double translation_lower_bound() const;

   private:
    void pop_tile();
    double weight(const Tile& t) const;

    struct Step {
      std::size_t frontier;
      std::size_t saved;
    };

    const LimitTree* tree_;
    int k_;
    std::vector<std::vector<double>> weights_;
    std::vector<Tile> stack_;
    std::vector<double> psum_{0.0};
    std::vector<Letter> letters_;
    std::vector<double> height_{0.0};
    std::vector<double> low_{0.0};
    std::vector<int> turns_;
    std::vector<Step> steps_;
    std::vector<Tile> saved_tiles_;
    std::vector<double> saved_psum_;
    std::vector<Tile> in_;
    std::vector<Tile> buf_;
    std::size_t frontier_ = 0;
  };

 private:

  Letter first_letter(const Tile& t) const;
  Letter last_letter(const Tile& t) const;
  void expand(const Tile& t, std::vector<Tile>& out) const;
  std::vector<Tile> reduce_tiles(const Word& w, int k) const;
  double tile_weight(const std::vector<Tile>& tiles, int k) const;
  void cyclic_reduce(std::deque<Tile>& d) const;
  Length iterate(const Word& w, bool cyclic) const;

  TrainTrackSpec spec_;
  LimitOptions options_;
  std::string name_;
  PFData pf_;
  // first_[j][key], last_[j][key] for positive letters at level j
  std::vector<std::vector<Letter>> first_;
  std::vector<std::vector<Letter>> last_;
  double turn_cancellation_ = 0.0;
};

}  // namespace dlam
