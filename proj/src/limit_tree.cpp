#include "dlam/limit_tree.hpp"

#include <cmath>
#include <deque>
#include <functional>
#include <map>

namespace dlam {

IntMatrix transition_matrix(const Automorphism& alpha) {
  const auto n = static_cast<std::size_t>(alpha.source().rank());
  IntMatrix M(n, std::vector<std::int64_t>(n, 0));
  for (std::size_t j = 0; j < n; ++j) {
    for (Letter x : alpha.images()[j]) ++M[static_cast<std::size_t>(generator_index(x))][j];
  }
  return M;
}

bool is_primitive(const IntMatrix& M) {
  const std::size_t n = M.size();
  if (n == 0) return false;
  for (const auto& row : M) {
    if (row.size() != n) throw ModelError("transition matrix is not square");
  }
  using Bool = std::vector<std::vector<char>>;
  Bool A(n, std::vector<char>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) A[i][j] = M[i][j] > 0;
  Bool P = A;
  const std::size_t bound = (n - 1) * (n - 1) + 1;
  for (std::size_t e = 1; e <= bound; ++e) {
    bool positive = true;
    for (const auto& row : P)
      for (char c : row) positive = positive && c;
    if (positive) return true;
    Bool Q(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        if (P[i][k])
          for (std::size_t j = 0; j < n; ++j) Q[i][j] = Q[i][j] || A[k][j];
    P = std::move(Q);
  }
  return false;
}

PFData pf_data(const IntMatrix& M) {
  if (!is_primitive(M)) throw ModelError("transition matrix is not primitive");
  const std::size_t n = M.size();
  std::vector<long double> v(n, 1.0L / static_cast<long double>(n));
  long double lambda = 0;
  for (int it = 0; it < 100000; ++it) {
    std::vector<long double> w(n, 0.0L);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) w[j] += v[i] * static_cast<long double>(M[i][j]);
    long double s = 0;
    for (auto x : w) s += x;
    lambda = s;
    long double change = 0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] /= s;
      change = std::max(change, std::fabs(w[i] - v[i]));
    }
    v = std::move(w);
    if (change < 1e-18L) break;
  }
  PFData out;
  out.lambda = static_cast<double>(lambda);
  for (auto x : v) out.v.push_back(static_cast<double>(x));
  for (std::size_t j = 0; j < n; ++j) {
    long double r = -lambda * v[j];
    for (std::size_t i = 0; i < n; ++i) r += v[i] * static_cast<long double>(M[i][j]);
    out.residual = std::max(out.residual, static_cast<double>(std::fabs(r)));
  }
  return out;
}

TrainTrackSpec TrainTrackSpec::make(Automorphism alpha, std::optional<IntMatrix> explicit_matrix, bool certified) {
  if (!(alpha.source() == alpha.target())) throw BasisMismatch("train track needs an automorphism of one basis");
  IntMatrix M = transition_matrix(alpha);
  if (explicit_matrix && *explicit_matrix != M) throw ModelError("transition matrix does not match the images");
  if (!alpha.is_positive() && !certified) {
    throw ModelError("automorphism is not positive; certify the train-track property to use it");
  }
  if (!is_primitive(M)) throw ModelError("transition matrix is not primitive");
  return TrainTrackSpec{std::move(alpha), std::move(M), certified};
}

namespace {

/// Largest weighted common prefix of α(X), α(Y) over positive X, Y with different
/// first letters. Throws if unbounded.
double prefix_cancellation(const std::vector<std::vector<Letter>>& images, const std::vector<double>& weight) {
  auto w = [&](std::span<const Letter> s) {
    double t = 0;
    for (Letter x : s) t += weight[static_cast<std::size_t>(generator_index(x))];
    return t;
  };
  std::map<std::vector<Letter>, double> memo;
  std::set<std::vector<Letter>> active;
  std::function<double(const std::vector<Letter>&)> best = [&](const std::vector<Letter>& u) -> double {
    if (auto it = memo.find(u); it != memo.end()) return it->second;
    if (!active.insert(u).second) throw ModelError("cancellation under iteration is unbounded");
    double b = 0;
    for (const auto& img : images) {
      std::size_t q = 0;
      while (q < u.size() && q < img.size() && u[q] == img[q]) ++q;
      if (q == img.size() && q < u.size()) {
        b = std::max(b, w(img) + best(std::vector<Letter>(u.begin() + static_cast<long>(q), u.end())));
      } else if (q == u.size() && q < img.size()) {
        b = std::max(b, w(u) + best(std::vector<Letter>(img.begin() + static_cast<long>(q), img.end())));
      } else if (q < u.size() && q < img.size()) {
        b = std::max(b, w(std::span<const Letter>(u).first(q)));
      }
    }
    active.erase(u);
    memo[u] = b;
    return b;
  };
  double out = 0;
  for (std::size_t x = 0; x < images.size(); ++x) {
    for (std::size_t y = 0; y < images.size(); ++y) {
      if (x == y) continue;
      const auto& a = images[x];
      const auto& b = images[y];
      std::size_t q = 0;
      while (q < a.size() && q < b.size() && a[q] == b[q]) ++q;
      if (q < a.size() && q < b.size()) {
        out = std::max(out, w(std::span<const Letter>(a).first(q)));
      } else if (q == a.size() && q < b.size()) {
        out = std::max(out, w(a) + best(std::vector<Letter>(b.begin() + static_cast<long>(q), b.end())));
      }
    }
  }
  return out;
}

}  // namespace

LimitTree::LimitTree(TrainTrackSpec spec, LimitOptions options, std::string name)
    : spec_(std::move(spec)), options_(options), name_(std::move(name)) {
  if (options_.k_max < 2) throw ModelError("k_max must be at least 2");
  if (!(options_.tol > 0)) throw ModelError("tolerance must be positive");
  if (!(options_.scale > 0)) throw ModelError("scale must be positive");
  pf_ = pf_data(spec_.matrix);
  if (!(pf_.lambda > 1)) throw ModelError("PF eigenvalue is not larger than 1");

  const int n = basis().rank();
  const int levels = options_.k_max + 1;
  first_.assign(static_cast<std::size_t>(levels), std::vector<Letter>(static_cast<std::size_t>(n)));
  last_ = first_;
  for (int g = 0; g < n; ++g) {
    first_[0][static_cast<std::size_t>(g)] = g + 1;
    last_[0][static_cast<std::size_t>(g)] = g + 1;
  }
  for (int j = 1; j < levels; ++j) {
    for (int g = 0; g < n; ++g) {
      const Word& img = spec_.alpha.images()[static_cast<std::size_t>(g)];
      first_[static_cast<std::size_t>(j)][static_cast<std::size_t>(g)] = first_letter({img.front(), j - 1});
      last_[static_cast<std::size_t>(j)][static_cast<std::size_t>(g)] = last_letter({img.back(), j - 1});
    }
  }

  std::vector<double> weight;
  for (int g = 0; g < n; ++g) weight.push_back(edge_length(g));
  if (spec_.alpha.is_positive()) {
    std::vector<std::vector<Letter>> images, reversed;
    for (const auto& img : spec_.alpha.images()) {
      images.push_back(img.letters());
      reversed.emplace_back(img.letters().rbegin(), img.letters().rend());
    }
    turn_cancellation_ = std::max(prefix_cancellation(images, weight), prefix_cancellation(reversed, weight));
  } else {
    double wmax = *std::max_element(weight.begin(), weight.end());
    turn_cancellation_ = static_cast<double>(spec_.alpha.image_volume()) * wmax;
  }
}

Letter LimitTree::first_letter(const Tile& t) const {
  const auto g = static_cast<std::size_t>(generator_index(t.letter));
  const auto j = static_cast<std::size_t>(t.level);
  return t.letter > 0 ? first_[j][g] : inverse(last_[j][g]);
}

Letter LimitTree::last_letter(const Tile& t) const {
  const auto g = static_cast<std::size_t>(generator_index(t.letter));
  const auto j = static_cast<std::size_t>(t.level);
  return t.letter > 0 ? last_[j][g] : inverse(first_[j][g]);
}

void LimitTree::expand(const Tile& t, std::vector<Tile>& out) const {
  const Word& img = spec_.alpha.image(t.letter);
  if (t.letter > 0) {
    for (Letter y : img) out.push_back({y, t.level - 1});
  } else {
    for (auto it = img.letters().rbegin(); it != img.letters().rend(); ++it) out.push_back({inverse(*it), t.level - 1});
  }
}

std::vector<LimitTree::Tile> LimitTree::reduce_tiles(const Word& w, int k) const {
  if (k < 0 || k > options_.k_max) throw std::out_of_range("iteration level outside [0, k_max]");
  std::vector<Tile> out;
  std::vector<Tile> in;
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) in.push_back({*it, k});
  std::vector<Tile> buf;
  while (!in.empty()) {
    const Tile u = in.back();
    if (out.empty() || last_letter(out.back()) != inverse(first_letter(u))) {
      out.push_back(u);
      in.pop_back();
      continue;
    }
    const Tile t = out.back();
    if (t.letter == inverse(u.letter) && t.level == u.level) {
      out.pop_back();
      in.pop_back();
    } else if (t.level >= u.level) {
      out.pop_back();
      expand(t, out);
    } else {
      in.pop_back();
      buf.clear();
      expand(u, buf);
      in.insert(in.end(), buf.rbegin(), buf.rend());
    }
  }
  return out;
}

double LimitTree::tile_weight(const std::vector<Tile>& tiles, int k) const {
  double total = 0;
  for (const auto& t : tiles) total += std::pow(pf_.lambda, t.level - k) * edge_length(generator_index(t.letter));
  return total;
}

void LimitTree::cyclic_reduce(std::deque<Tile>& d) const {
  std::vector<Tile> buf;
  while (!d.empty()) {
    if (d.size() == 1) {
      const Tile t = d.front();
      if (t.level == 0 || first_letter(t) != inverse(last_letter(t))) break;
      d.clear();
      buf.clear();
      expand(t, buf);
      d.assign(buf.begin(), buf.end());
      continue;
    }
    const Tile f = d.front();
    const Tile b = d.back();
    if (last_letter(b) != inverse(first_letter(f))) break;
    if (f.letter == inverse(b.letter) && f.level == b.level) {
      d.pop_front();
      d.pop_back();
    } else if (f.level >= b.level) {
      d.pop_front();
      buf.clear();
      expand(f, buf);
      for (auto it = buf.rbegin(); it != buf.rend(); ++it) d.push_front(*it);
    } else {
      d.pop_back();
      buf.clear();
      expand(b, buf);
      for (const auto& x : buf) d.push_back(x);
    }
  }
}

double LimitTree::level_value(const Word& w, int k, bool cyclic) const {
  std::vector<Tile> tiles = reduce_tiles(w, k);
  if (!cyclic) return tile_weight(tiles, k);
  std::deque<Tile> d(tiles.begin(), tiles.end());
  cyclic_reduce(d);
  return tile_weight(std::vector<Tile>(d.begin(), d.end()), k);
}

Length LimitTree::iterate(const Word& w, bool cyclic) const {
  if (w.empty()) return Length::estimate(0.0, 0.0, true);
  for (Letter x : w) {
    if (!basis().contains(x)) throw BasisMismatch("word uses a letter outside the model basis");
  }
  double previous = level_value(w, 0, cyclic);
  double increment = 0;
  int streak = 0;
  for (int k = 1; k <= options_.k_max; ++k) {
    const double value = level_value(w, k, cyclic);
    increment = std::fabs(value - previous);
    previous = value;
    if (increment <= options_.tol * value) {
      if (++streak >= 2) return Length::estimate(value, increment, true);
    } else {
      streak = 0;
    }
  }
  return Length::estimate(previous, increment, false);
}

Length LimitTree::translation_length(const CyclicWord& w) const {
  if (w.empty()) throw std::invalid_argument("translation length of the identity is undefined here");
  return iterate(w.word(), true);
}

Length LimitTree::displacement(const Word& w) const { return iterate(w, false); }

Length LimitTree::bbt_bound() const {
  double total = 0;
  for (int g = 0; g < basis().rank(); ++g) total += edge_length(g);
  // limit map cancels at most BCC(α)/(λ-1); per-turn constant is BCC(α) for positive α
  if (spec_.alpha.is_positive()) total = std::min(total, turn_cancellation_ / (pf_.lambda - 1.0));
  return Length::estimate(total, 0.0, true);
}

double LimitTree::turn_slack(int k) const {
  return 2.0 * turn_cancellation_ * std::pow(pf_.lambda, -k) / (pf_.lambda - 1.0);
}

double LimitTree::displacement_lower_bound(const Word& w, int k) const {
  if (w.empty()) return 0.0;
  std::size_t turns = 0;
  if (spec_.alpha.is_positive()) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i) turns += (w[i] > 0) != (w[i + 1] > 0);
  } else {
    turns = w.size() - 1;
  }
  return level_value(w, k, false) - static_cast<double>(turns) * turn_slack(k);
}

LimitTree::Bracket LimitTree::translation_bracket(const CyclicWord& w, int k) const {
  const Word& u = w.word();
  if (u.empty()) return {};
  std::size_t turns = u.size();
  if (spec_.alpha.is_positive()) {
    turns = 0;
    for (std::size_t i = 0; i < u.size(); ++i) turns += (u[i] > 0) != (u[(i + 1) % u.size()] > 0);
  }
  const double upper = level_value(u, k, true);
  return {upper - static_cast<double>(turns) * turn_slack(k), upper};
}

// ---------------------------------------------------------------- prefix walker

LimitTree::PrefixWalker::PrefixWalker(const LimitTree& tree, int k) : tree_(&tree), k_(k) {
  if (k < 0 || k > tree.options_.k_max) throw std::out_of_range("iteration level outside [0, k_max]");
  const int n = tree.basis().rank();
  weights_.assign(static_cast<std::size_t>(k + 1), std::vector<double>(static_cast<std::size_t>(n)));
  for (int j = 0; j <= k; ++j)
    for (int g = 0; g < n; ++g)
      weights_[static_cast<std::size_t>(j)][static_cast<std::size_t>(g)] =
          std::pow(tree.pf_.lambda, j - k) * tree.edge_length(g);
}

double LimitTree::PrefixWalker::weight(const Tile& t) const {
  return weights_[static_cast<std::size_t>(t.level)][static_cast<std::size_t>(generator_index(t.letter))];
}

void LimitTree::PrefixWalker::pop_tile() {
  const std::size_t p = stack_.size() - 1;
  if (p < frontier_) {
    saved_tiles_.push_back(stack_[p]);
    saved_psum_.push_back(psum_[p + 1]);
    frontier_ = p;
  }
  stack_.pop_back();
  psum_.pop_back();
}

void LimitTree::PrefixWalker::push(Letter x) {
  if (!tree_->basis().contains(x)) throw BasisMismatch("word uses a letter outside the model basis");
  const std::size_t saved = saved_tiles_.size();
  frontier_ = stack_.size();
  double low = psum_.back();
  in_.clear();
  in_.push_back({x, k_});
  while (!in_.empty()) {
    const Tile u = in_.back();
    if (stack_.empty() || tree_->last_letter(stack_.back()) != inverse(tree_->first_letter(u))) {
      stack_.push_back(u);
      psum_.push_back(psum_.back() + weight(u));
      in_.pop_back();
      continue;
    }
    const Tile t = stack_.back();
    if (t.letter == inverse(u.letter) && t.level == u.level) {
      pop_tile();
      in_.pop_back();
      low = std::min(low, psum_.back());
    } else if (t.level >= u.level) {
      pop_tile();
      buf_.clear();
      tree_->expand(t, buf_);
      for (const auto& c : buf_) {
        stack_.push_back(c);
        psum_.push_back(psum_.back() + weight(c));
      }
    } else {
      in_.pop_back();
      buf_.clear();
      tree_->expand(u, buf_);
      in_.insert(in_.end(), buf_.rbegin(), buf_.rend());
    }
  }
  steps_.push_back({frontier_, saved});
  if (!letters_.empty()) {
    turns_.push_back(turns_.back() + ((letters_.back() > 0) != (x > 0) ? 1 : 0));
  } else {
    turns_.push_back(0);
  }
  letters_.push_back(x);
  height_.push_back(psum_.back());
  low_.push_back(low);
}

void LimitTree::PrefixWalker::pop() {
  if (letters_.empty()) throw std::logic_error("pop from an empty walker");
  const Step step = steps_.back();
  steps_.pop_back();
  stack_.resize(step.frontier);
  psum_.resize(step.frontier + 1);
  for (std::size_t i = saved_tiles_.size(); i > step.saved; --i) {
    stack_.push_back(saved_tiles_[i - 1]);
    psum_.push_back(saved_psum_[i - 1]);
  }
  saved_tiles_.resize(step.saved);
  saved_psum_.resize(step.saved);
  letters_.pop_back();
  turns_.pop_back();
  height_.pop_back();
  low_.pop_back();
}

void LimitTree::PrefixWalker::suffix_lower_bounds(std::vector<double>& out) const {
  const std::size_t n = letters_.size();
  out.assign(n, 0.0);
  if (n == 0) return;
  const bool positive = tree_->spec_.alpha.is_positive();
  const double slack = tree_->turn_slack(k_);
  const double top = height_[n];
  double running = top;
  for (std::size_t i = n; i-- > 0;) {
    running = std::min(running, low_[i + 1]);
    const double common = std::min(height_[i], running);
    const auto turns = positive ? turns_[n - 1] - turns_[i] : static_cast<int>(n - 1 - i);
    out[i] = height_[i] + top - 2.0 * common - turns * slack;
  }
}

double LimitTree::PrefixWalker::translation_lower_bound() const {
  const std::size_t n = letters_.size();
  if (n == 0) return 0.0;
  std::deque<Tile> d(stack_.begin(), stack_.end());
  tree_->cyclic_reduce(d);
  double total = 0;
  for (const auto& t : d) total += weight(t);
  int turns = static_cast<int>(n);
  if (tree_->spec_.alpha.is_positive()) {
    turns = turns_[n - 1] + ((letters_.front() > 0) != (letters_.back() > 0) ? 1 : 0);
  }
  return total - turns * tree_->turn_slack(k_);
}

nlohmann::json LimitTree::describe() const {
  nlohmann::json images = nlohmann::json::object();
  const Basis& b = basis();
  for (int i = 0; i < b.rank(); ++i) {
    images[b.letters()[static_cast<std::size_t>(i)]] = b.format(spec_.alpha.images()[static_cast<std::size_t>(i)]);
  }
  std::vector<std::string> v;
  for (int i = 0; i < b.rank(); ++i) v.push_back(format_real(edge_length(i)));
  return {{"type", "limit"},
          {"name", name_},
          {"basis", b.letters()},
          {"images", images},
          {"lambda", format_real(pf_.lambda)},
          {"edge_lengths", v},
          {"k_max", options_.k_max},
          {"tol", format_real(options_.tol)},
          {"train_track", spec_.alpha.is_positive() ? "positive" : "user-certified"},
          {"dense_orbits", "assumed"}};
}

}  // namespace dlam
