#include "dlam/lamination.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>

#include "dlam/limit_tree.hpp"
#include "dlam/parallel.hpp"

namespace dlam {

// ---------------------------------------------------------------- closure

namespace {

bool has_extension(const WordSet& words, const Word& u, int rank, bool right) {
  for (int k = 0; k < 2 * rank; ++k) {
    const Letter x = letter_from_key(k);
    std::vector<Letter> l = u.letters();
    if (right) {
      if (!l.empty() && l.back() == inverse(x)) continue;
      l.push_back(x);
    } else {
      if (!l.empty() && l.front() == inverse(x)) continue;
      l.insert(l.begin(), x);
    }
    if (words.count(Word::from_reduced(std::move(l))) != 0) return true;
  }
  return false;
}

}  // namespace

ClosureReport check_laminary(const WordSet& words, std::size_t depth, int rank) {
  ClosureReport r;
  auto witness = [&](const Word& w) {
    if (r.witnesses.size() < 8) r.witnesses.push_back(w);
  };
  for (const auto& w : words) {
    if (w.empty() || w.size() > depth) {
      r.factor_closed = false;
      witness(w);
      continue;
    }
    if (words.count(w.inverse()) == 0) {
      r.inverse_closed = false;
      witness(w);
    }
    if (w.size() >= 2 && (words.count(w.prefix(w.size() - 1)) == 0 || words.count(w.suffix(w.size() - 1)) == 0)) {
      r.factor_closed = false;
      witness(w);
    }
    if (w.size() < depth && (!has_extension(words, w, rank, true) || !has_extension(words, w, rank, false))) {
      r.extendable = false;
      witness(w);
    }
  }
  return r;
}

WordSet laminary_closure(WordSet words, std::size_t depth, int rank) {
  WordSet closed;
  for (const auto& w : words) {
    if (w.empty()) continue;
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t len = 1; len <= depth && i + len <= w.size(); ++len) {
        Word f = w.factor(i, len);
        closed.insert(f.inverse());
        closed.insert(std::move(f));
      }
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = closed.begin(); it != closed.end();) {
      const Word& w = *it;
      const bool orphan =
          w.size() >= 2 && (closed.count(w.prefix(w.size() - 1)) == 0 || closed.count(w.suffix(w.size() - 1)) == 0);
      if (orphan ||
          (w.size() < depth && (!has_extension(closed, w, rank, true) || !has_extension(closed, w, rank, false)))) {
        it = closed.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }
  return closed;
}

// ---------------------------------------------------------------- languages

LaminaryLanguage::LaminaryLanguage(Basis basis, std::size_t depth, WordSet words, nlohmann::json provenance)
    : basis_(std::move(basis)), depth_(depth), words_(std::move(words)), provenance_(std::move(provenance)) {
  if (depth_ == 0) throw std::invalid_argument("language depth must be positive");
  for (const auto& w : words_) {
    for (Letter x : w) {
      if (!basis_.contains(x)) throw BasisMismatch("language word outside basis '" + basis_.name() + "'");
    }
  }
}

bool LaminaryLanguage::subset_of(const LaminaryLanguage& other) const {
  return std::includes(other.words_.begin(), other.words_.end(), words_.begin(), words_.end());
}

LaminaryLanguage LaminaryLanguage::truncate(std::size_t d) const {
  WordSet out;
  for (const auto& w : words_) {
    if (w.size() <= d) out.insert(w);
  }
  LaminaryLanguage l(basis_, std::min(d, depth_), std::move(out), provenance_);
  l.flags_ = flags_;
  return l;
}

LanguageDiff compare(const LaminaryLanguage& left, const LaminaryLanguage& right) {
  LanguageDiff d;
  std::set_difference(left.words().begin(), left.words().end(), right.words().begin(), right.words().end(),
                      std::inserter(d.left_minus_right, d.left_minus_right.end()));
  std::set_difference(right.words().begin(), right.words().end(), left.words().begin(), left.words().end(),
                      std::inserter(d.right_minus_left, d.right_minus_left.end()));
  d.equal = d.left_minus_right.empty() && d.right_minus_left.empty();
  return d;
}

LaminaryLanguage rational_language(const Basis& basis, const CyclicWord& w, std::size_t depth) {
  if (w.empty()) throw std::invalid_argument("rational lamination of the identity");
  return LaminaryLanguage(basis, depth, periodic_factors(w.word(), depth),
                          {{"construction", "rational"}, {"word", basis.format(w.word())}, {"depth", depth}});
}

// ---------------------------------------------------------------- Ω enumeration

namespace {

/// Decides whether a prefix can still be a factor of some w with ‖w‖ < ε.
class Pruner {
 public:
  Pruner(const TreeModel& T, const Threshold& epsilon) : T_(T), limit_(dynamic_cast<const LimitTree*>(&T)) {
    const Length bbt = T.bbt_bound();
    if (T.exact() && bbt.is_exact && epsilon.exact) {
      exact_bound_ = 2 * bbt.exact + *epsilon.exact;
    }
    bound_ = 2 * bbt.value + epsilon.value;
    if (limit_) level_ = std::min(limit_->options().k_max, 12);
  }

  bool heuristic() const { return !T_.exact() && !limit_; }

  bool keep(const Word& u) const {
    if (limit_) return limit_->displacement_lower_bound(u, level_) < bound_;
    const Length d = T_.displacement(u);
    if (d.is_exact) {
      if (exact_bound_) return d.exact < *exact_bound_;
      return to_double(d.exact) < bound_;
    }
    return d.value - d.error < bound_;
  }

 private:
  const TreeModel& T_;
  const LimitTree* limit_;
  std::optional<Rational> exact_bound_;
  double bound_ = 0;
  int level_ = 0;
};

struct ShardResult {
  std::vector<CyclicWord> found;
  std::size_t visited = 0;
  bool unconverged = false;
};

}  // namespace

namespace {

/// Search specialised to limit trees: every factor of the current prefix is bounded
/// through one incremental level-K reduction, and prefixes that cannot start a least
/// rotation are dropped (prenecklace test with the running Lyndon period).
class LimitSearch {
 public:
  LimitSearch(const LimitTree& T, const Threshold& epsilon, std::size_t cap)
      : T_(T), epsilon_(epsilon), cap_(cap), level_(std::min(T.options().k_max, 12)) {
    bound_ = 2 * T.bbt_bound().value + epsilon.value;
  }

  int level() const { return level_; }

  void run(LimitTree::PrefixWalker& w, std::vector<std::size_t>& period, ShardResult& out, std::size_t stop = 0,
           std::vector<std::vector<Letter>>* collect = nullptr) const {
    std::vector<double> lb;
    node(w, period, out, lb, stop, collect);
  }

  static std::size_t next_period(const std::vector<Letter>& u, std::size_t p, Letter x) {
    const Letter ref = u[u.size() - p];
    if (letter_key(x) < letter_key(ref)) return 0;
    return letter_key(x) == letter_key(ref) ? p : u.size() + 1;
  }

 private:
  static constexpr double margin = 1e-9;

  void node(LimitTree::PrefixWalker& w, std::vector<std::size_t>& period, ShardResult& out, std::vector<double>& lb,
            std::size_t stop, std::vector<std::vector<Letter>>* collect) const {
    const std::vector<Letter>& u = w.letters();
    const std::size_t n = u.size();
    if (collect && n == stop) {
      collect->push_back(u);
      return;
    }
    ++out.visited;
    w.suffix_lower_bounds(lb);
    for (double x : lb) {
      if (x > bound_ + margin) return;
    }
    if (n % period.back() == 0 && (n == 1 || u.front() != inverse(u.back())) &&
        w.translation_lower_bound() < epsilon_.value + margin && is_canonical_cyclic(u)) {
      CyclicWord c(Word::from_reduced(u));
      // members need the upper bound clear of ε; anything closer is left out and flagged
      const auto b = T_.translation_bracket(c, T_.options().k_max);
      const double tie = 1e-10 * epsilon_.value + 1e-13;
      if (b.upper < epsilon_.value - tie) {
        out.found.push_back(std::move(c));
      } else if (b.lower < epsilon_.value + tie) {
        out.unconverged = true;
      }
    }
    if (n >= cap_) return;
    const Letter last = u.back();
    const std::size_t p = period.back();
    const int rank = T_.basis().rank();
    for (int k = 0; k < 2 * rank; ++k) {
      const Letter x = letter_from_key(k);
      if (x == inverse(last)) continue;
      const std::size_t q = next_period(w.letters(), p, x);
      if (q == 0) continue;
      w.push(x);
      period.push_back(q);
      node(w, period, out, lb, stop, collect);
      period.pop_back();
      w.pop();
    }
  }

  const LimitTree& T_;
  Threshold epsilon_;
  std::size_t cap_;
  int level_;
  double bound_ = 0;
};

OmegaSet omega_enumerate_limit(const LimitTree& T, const Threshold& epsilon, std::size_t length_cap, int jobs) {
  const LimitSearch search(T, epsilon, length_cap);
  const int rank = T.basis().rank();
  const std::size_t stop = std::min<std::size_t>(length_cap, 4) + 1;

  ShardResult head;
  std::vector<std::vector<Letter>> shards;
  for (int k = 0; k < 2 * rank; ++k) {
    LimitTree::PrefixWalker w(T, search.level());
    w.push(letter_from_key(k));
    std::vector<std::size_t> period{1};
    search.run(w, period, head, stop, &shards);
  }
  auto results = parallel_map<ShardResult>(shards.size(), jobs, [&](std::size_t i) {
    ShardResult out;
    LimitTree::PrefixWalker w(T, search.level());
    std::vector<std::size_t> period;
    for (Letter x : shards[i]) {
      period.push_back(w.size() == 0 ? 1 : LimitSearch::next_period(w.letters(), period.back(), x));
      w.push(x);
    }
    search.run(w, period, out);
    return out;
  });

  OmegaSet omega;
  omega.epsilon = epsilon;
  omega.length_cap = length_cap;
  omega.visited = head.visited;
  omega.elements = std::move(head.found);
  bool unconverged = head.unconverged;
  for (auto& r : results) {
    omega.visited += r.visited;
    unconverged = unconverged || r.unconverged;
    omega.elements.insert(omega.elements.end(), r.found.begin(), r.found.end());
  }
  std::sort(omega.elements.begin(), omega.elements.end());
  if (unconverged) omega.flags.insert("unconverged");
  omega.flags.insert("numeric");
  if (omega.elements.empty()) omega.flags.insert("free-simplicial");
  return omega;
}

}  // namespace

OmegaSet omega_enumerate(const TreeModel& T, const Threshold& epsilon, std::size_t length_cap, int jobs) {
  if (!(epsilon.value > 0)) throw std::invalid_argument("ε must be positive");
  if (length_cap == 0) throw std::invalid_argument("length cap must be at least 1");
  if (const auto* limit = dynamic_cast<const LimitTree*>(&T)) return omega_enumerate_limit(*limit, epsilon, length_cap, jobs);
  if (!(epsilon.value > 0)) throw std::invalid_argument("ε must be positive");
  if (length_cap == 0) throw std::invalid_argument("length cap must be at least 1");
  const int rank = T.basis().rank();
  const Pruner pruner(T, epsilon);

  auto consider = [&](const Word& u, ShardResult& out) {
    if (!u.is_cyclically_reduced() || !is_canonical_cyclic(u.letters())) return;
    CyclicWord c(u);
    const Length l = T.translation_length(c);
    if (!l.converged) out.unconverged = true;
    if (strictly_below(l, epsilon)) out.found.push_back(std::move(c));
  };

  std::function<void(std::vector<Letter>&, ShardResult&)> dfs = [&](std::vector<Letter>& u, ShardResult& out) {
    ++out.visited;
    const Word w = Word::from_reduced(u);
    if (!pruner.keep(w)) return;
    consider(w, out);
    if (u.size() >= length_cap) return;
    for (int k = 0; k < 2 * rank; ++k) {
      const Letter x = letter_from_key(k);
      if (x == inverse(u.back())) continue;
      u.push_back(x);
      dfs(u, out);
      u.pop_back();
    }
  };

  // shards: reduced words of length 2; length-1 words are handled first
  std::vector<std::vector<Letter>> shards;
  ShardResult singles;
  for (int k = 0; k < 2 * rank; ++k) {
    const Letter x = letter_from_key(k);
    ++singles.visited;
    if (!pruner.keep(Word::letter(x))) continue;
    consider(Word::letter(x), singles);
    if (length_cap < 2) continue;
    for (int j = 0; j < 2 * rank; ++j) {
      const Letter y = letter_from_key(j);
      if (y != inverse(x)) shards.push_back({x, y});
    }
  }
  auto results = parallel_map<ShardResult>(shards.size(), jobs, [&](std::size_t i) {
    ShardResult out;
    std::vector<Letter> u = shards[i];
    dfs(u, out);
    return out;
  });

  OmegaSet omega;
  omega.epsilon = epsilon;
  omega.length_cap = length_cap;
  omega.visited = singles.visited;
  omega.elements = std::move(singles.found);
  bool unconverged = singles.unconverged;
  for (auto& r : results) {
    omega.visited += r.visited;
    unconverged = unconverged || r.unconverged;
    omega.elements.insert(omega.elements.end(), r.found.begin(), r.found.end());
  }
  std::sort(omega.elements.begin(), omega.elements.end());
  if (unconverged) omega.flags.insert("unconverged");
  if (pruner.heuristic()) omega.flags.insert("heuristic-pruning");
  if (!T.exact()) omega.flags.insert("numeric");
  if (omega.elements.empty()) omega.flags.insert("free-simplicial");
  return omega;
}

LaminaryLanguage l_epsilon_language(const Basis& basis, const OmegaSet& omega, std::size_t depth) {
  WordSet words;
  for (const auto& w : omega.elements) {
    WordSet f = periodic_factors(w.word(), depth);
    words.insert(f.begin(), f.end());
  }
  words = laminary_closure(std::move(words), depth, basis.rank());
  LaminaryLanguage L(basis, depth, std::move(words),
                     {{"construction", "l_epsilon"},
                      {"epsilon", omega.epsilon.to_string()},
                      {"length_cap", omega.length_cap},
                      {"omega_size", omega.elements.size()}});
  for (const auto& f : omega.flags) {
    if (f != "free-simplicial") L.flag(f);
  }
  if (omega.length_cap < 2 * depth) L.flag("undercount");
  return L;
}

LaminaryLanguage l_epsilon_language(const TreeModel& T, const Threshold& epsilon, std::size_t depth,
                                    std::size_t length_cap, int jobs) {
  LaminaryLanguage L = l_epsilon_language(T.basis(), omega_enumerate(T, epsilon, length_cap, jobs), depth);
  L.provenance()["model"] = T.id();
  return L;
}

LaminaryLanguage l_omega_language(const TreeModel& T, std::size_t depth, const std::vector<Threshold>& schedule,
                                  std::size_t length_cap, int jobs) {
  if (schedule.empty()) throw std::invalid_argument("ε schedule is empty");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    const bool decreasing = schedule[i].exact && schedule[i - 1].exact ? *schedule[i].exact < *schedule[i - 1].exact
                                                                       : schedule[i].value < schedule[i - 1].value;
    if (!decreasing) throw std::invalid_argument("ε schedule must be strictly decreasing");
  }
  // L_ε only shrinks as ε does, so the intersection is the last step; the step
  // before it is still needed to decide stabilization
  const std::size_t first = schedule.size() >= 2 ? schedule.size() - 2 : 0;
  auto sizes = nlohmann::json::array();
  for (std::size_t i = 0; i < first; ++i) sizes.push_back(nullptr);
  std::set<std::string> flags;
  WordSet previous, last;
  bool stabilized = false;
  for (std::size_t i = first; i < schedule.size(); ++i) {
    LaminaryLanguage step = l_epsilon_language(T, schedule[i], depth, length_cap, jobs);
    flags.insert(step.flags().begin(), step.flags().end());
    sizes.push_back(step.words().size());
    if (i > first) stabilized = step.words() == previous;
    previous = step.words();
    last = step.words();
  }
  auto eps = nlohmann::json::array();
  for (const auto& e : schedule) eps.push_back(e.to_string());
  LaminaryLanguage L(T.basis(), depth, laminary_closure(std::move(last), depth, T.basis().rank()),
                     {{"construction", "l_omega"},
                      {"model", T.id()},
                      {"schedule", eps},
                      {"length_cap", length_cap},
                      {"step_sizes", sizes},
                      {"stabilized", stabilized}});
  for (const auto& f : flags) L.flag(f);
  if (!stabilized) L.flag("unstabilized");
  return L;
}

std::vector<CyclicWord> enumerate_cyclic_words(int rank, std::size_t cap) {
  std::vector<CyclicWord> out;
  std::vector<Letter> u;
  std::function<void()> rec = [&] {
    if (!u.empty()) {
      Word w = Word::from_reduced(u);
      if (w.is_cyclically_reduced() && is_canonical_cyclic(u)) out.emplace_back(w);
    }
    if (u.size() >= cap) return;
    for (int k = 0; k < 2 * rank; ++k) {
      const Letter x = letter_from_key(k);
      if (!u.empty() && x == inverse(u.back())) continue;
      u.push_back(x);
      rec();
      u.pop_back();
    }
  };
  rec();
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Threshold> default_schedule(const TreeModel& T, std::size_t length_cap) {
  if (auto* limit = dynamic_cast<const LimitTree*>(&T)) {
    const double b = limit->bbt_bound().value;
    const double l = limit->lambda();
    return {Threshold::of(b * std::pow(l, -4)), Threshold::of(b * std::pow(l, -6)), Threshold::of(b * std::pow(l, -8))};
  }
  std::optional<Length> m;
  for (const auto& c : enumerate_cyclic_words(T.basis().rank(), std::min<std::size_t>(length_cap, 6))) {
    Length l = T.translation_length(c);
    if (l.is_zero()) continue;
    if (!m || !at_most(*m, l)) m = l;
  }
  if (!m) return {Threshold::of(Rational(1)), Threshold::of(Rational(1, 2)), Threshold::of(Rational(1, 4))};
  if (m->is_exact) {
    return {Threshold::of(m->exact / 2), Threshold::of(m->exact / 4), Threshold::of(m->exact / 8)};
  }
  return {Threshold::of(m->value / 2), Threshold::of(m->value / 4), Threshold::of(m->value / 8)};
}

// ---------------------------------------------------------------- rays

LaminaryLanguage l_infinity_language(const Basis& basis, const std::vector<Ray>& rays, std::size_t depth) {
  if (rays.empty()) throw std::invalid_argument("no rays given");
  WordSet words;
  for (const auto& r : rays) {
    WordSet f = recurrent_factors(r, depth);
    words.insert(f.begin(), f.end());
  }
  return LaminaryLanguage(basis, depth, laminary_closure(std::move(words), depth, basis.rank()),
                          {{"construction", "l_infinity"}, {"rays", rays.size()}, {"depth", depth}});
}

std::vector<Ray> enumerate_rays(int rank, std::size_t prefix_cap, std::size_t period_cap) {
  std::vector<Word> prefixes{Word()};
  std::vector<Word> periods;
  std::vector<Letter> u;
  std::function<void()> rec = [&] {
    if (!u.empty()) {
      Word w = Word::from_reduced(u);
      if (u.size() <= prefix_cap) prefixes.push_back(w);
      if (u.size() <= period_cap && w.is_cyclically_reduced() && primitive_root(w) == w) periods.push_back(w);
    }
    if (u.size() >= std::max(prefix_cap, period_cap)) return;
    for (int k = 0; k < 2 * rank; ++k) {
      const Letter x = letter_from_key(k);
      if (!u.empty() && x == inverse(u.back())) continue;
      u.push_back(x);
      rec();
      u.pop_back();
    }
  };
  rec();
  std::set<Ray> rays;
  for (const auto& p : prefixes) {
    for (const auto& v : periods) rays.insert(Ray(p, v));
  }
  return {rays.begin(), rays.end()};
}

bool l1_infinity_member(const Ray& r, const LaminaryLanguage& L) {
  const WordSet f = recurrent_factors(r, L.depth());
  return std::includes(L.words().begin(), L.words().end(), f.begin(), f.end());
}

// ---------------------------------------------------------------- L1 rays from seed words

std::string regime_name(L1RayCertificate::Regime r) {
  switch (r) {
    case L1RayCertificate::Regime::CyclicallyReduced:
      return "cyclically-reduced";
    case L1RayCertificate::Regime::ConstantConjugator:
      return "constant-conjugator";
    case L1RayCertificate::Regime::IncreasingConjugator:
      return "increasing-conjugator";
  }
  return "?";
}

bool L1RayCertificate::junctions_ok() const {
  for (std::size_t j = 0; j < junction_cancellation.size(); ++j) {
    if (junction_cancellation[j] > std::min(conjugator_lengths[j], conjugator_lengths[j + 1])) return false;
  }
  return true;
}

L1RayCertificate build_l1_ray(const std::vector<Word>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("no seed words");
  std::vector<ConjugacyDecomposition> dec;
  for (const auto& w : seeds) {
    if (w.empty()) throw std::invalid_argument("seed words must be nontrivial");
    dec.push_back(cyclic_decompose(w));
  }
  const std::size_t n = seeds.size();

  // longest strictly increasing run of conjugator lengths, earliest indices on ties
  std::vector<std::size_t> best(n, 1), prev(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (dec[j].conjugator.size() < dec[i].conjugator.size() && best[j] + 1 > best[i]) {
        best[i] = best[j] + 1;
        prev[i] = j;
      }
    }
  }
  std::size_t end = static_cast<std::size_t>(std::max_element(best.begin(), best.end()) - best.begin());
  std::vector<std::size_t> increasing;
  for (std::size_t i = end; i != n; i = prev[i]) increasing.push_back(i);
  std::reverse(increasing.begin(), increasing.end());

  std::map<Word, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < n; ++i) classes[dec[i].conjugator].push_back(i);
  const std::vector<std::size_t>* constant = nullptr;
  for (const auto& [conj, idx] : classes) {
    if (!constant || idx.size() > constant->size()) constant = &idx;
  }

  L1RayCertificate cert;
  std::vector<Word> parts;
  if (constant->size() >= increasing.size()) {
    cert.selected = *constant;
    cert.regime = dec[cert.selected.front()].conjugator.empty() ? L1RayCertificate::Regime::CyclicallyReduced
                                                                : L1RayCertificate::Regime::ConstantConjugator;
    Letter last = 0;
    for (std::size_t i : cert.selected) {
      const Word& core = dec[i].core;
      int sign = 1;
      if (last != 0 && core.front() == inverse(last)) sign = -1;
      cert.signs.push_back(sign);
      last = sign > 0 ? core.back() : inverse(core.front());
    }
  } else {
    cert.selected = increasing;
    cert.regime = L1RayCertificate::Regime::IncreasingConjugator;
    cert.signs.assign(cert.selected.size(), 1);
    for (std::size_t j = 0; j + 1 < cert.selected.size(); ++j) {
      const std::size_t a = cert.selected[j];
      const std::size_t b = cert.selected[j + 1];
      const Word wa = seeds[a].power(cert.signs[j]);
      if (cancellation(wa, seeds[b]) > dec[a].conjugator.size()) cert.signs[j] = -cert.signs[j];
    }
  }
  std::size_t total = 0;
  for (std::size_t j = 0; j < cert.selected.size(); ++j) {
    const std::size_t i = cert.selected[j];
    parts.push_back(seeds[i].power(cert.signs[j]));
    cert.conjugator_lengths.push_back(dec[i].conjugator.size());
    total += seeds[i].size();
  }
  std::size_t cancelled = 0;
  for (std::size_t j = 0; j + 1 < parts.size(); ++j) {
    cert.junction_cancellation.push_back(cancellation(parts[j], parts[j + 1]));
    cancelled += cert.junction_cancellation.back();
  }
  for (const auto& p : parts) cert.concatenation = cert.concatenation * p;
  cert.total_length_ok = cert.concatenation.size() == total - 2 * cancelled;
  return cert;
}

// ---------------------------------------------------------------- diagonal closure and the Out action

std::set<Leaf> diagonal_closure(const std::set<Leaf>& leaves) {
  std::map<Ray, int> index;
  std::vector<Ray> rays;
  for (const auto& l : leaves) {
    for (const Ray* r : {&l.left(), &l.right()}) {
      if (index.emplace(*r, static_cast<int>(rays.size())).second) rays.push_back(*r);
    }
  }
  std::vector<int> parent(rays.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[static_cast<std::size_t>(x)] == x ? x : parent[static_cast<std::size_t>(x)] = find(parent[static_cast<std::size_t>(x)]);
  };
  for (const auto& l : leaves) {
    int a = find(index[l.left()]);
    int b = find(index[l.right()]);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
  std::map<int, std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < rays.size(); ++i) components[find(static_cast<int>(i))].push_back(i);
  std::set<Leaf> out;
  for (const auto& [root, members] : components) {
    for (std::size_t i : members)
      for (std::size_t j : members)
        if (i != j) out.emplace(rays[i], rays[j]);
  }
  return out;
}

LaminaryLanguage act_on_language(const Automorphism& alpha, const LaminaryLanguage& L, std::size_t chop_bound) {
  if (chop_bound >= L.depth()) throw std::invalid_argument("chop bound leaves nothing at this depth");
  if (!(alpha.source() == L.basis())) throw BasisMismatch("automorphism and language use different bases");
  const Automorphism inv = alpha.inverse();
  const std::size_t depth = L.depth() - chop_bound;
  WordSet words;
  for (const auto& z : L.words()) {
    WordSet f = subwords(chop(inv.apply(z), chop_bound), depth);
    words.insert(f.begin(), f.end());
  }
  LaminaryLanguage out(L.basis(), depth, laminary_closure(std::move(words), depth, L.basis().rank()),
                       {{"construction", "act"}, {"source", L.provenance()}, {"chop_bound", chop_bound}});
  for (const auto& f : L.flags()) out.flag(f);
  return out;
}

}  // namespace dlam
