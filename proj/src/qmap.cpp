#include "dlam/qmap.hpp"

#include <algorithm>
#include <map>

#include "dlam/limit_tree.hpp"
#include "dlam/parallel.hpp"

namespace dlam {

namespace {

Rational exact_displacement(const TreeModel& T, const Word& w) {
  const Length d = T.displacement(w);
  if (!d.is_exact) throw ModelError("Q-points need an exact model");
  return d.exact;
}

void require_exact(const TreeModel& T) {
  if (!T.exact()) throw ModelError("Q-points are only available on exact models");
}

}  // namespace

L1Verdict l1_test(const Ray& r, const TreeModel& T) {
  L1Verdict out;
  const Word& u = r.prefix();
  const Word& v = r.period();
  const Length tl = T.translation_length(CyclicWord(v));
  if (T.exact()) {
    out.member = tl.exact == Rational(0);
  } else {
    const double threshold = 10 * dynamic_cast<const LimitTree&>(T).options().tol * T.bbt_bound().value;
    out.member = tl.value < threshold;
    out.exact = false;
  }
  if (out.member) {
    // d(P, u v^m v' P) <= d(u) + d(v) + d(v') since v^m is elliptic
    Length best = Length::of(Rational(0));
    if (!T.exact()) best = Length::estimate(0.0, 0.0, true);
    auto bigger = [&](const Length& a, const Length& b) { return a.is_exact ? a.exact > b.exact : a.value > b.value; };
    for (std::size_t k = 1; k <= u.size(); ++k) {
      const Length d = T.displacement(u.prefix(k));
      if (bigger(d, best)) best = d;
    }
    const Length base = T.displacement(u) + T.displacement(v);
    Length tail = T.displacement(Word());
    for (std::size_t k = 1; k < v.size(); ++k) {
      const Length d = T.displacement(v.prefix(k));
      if (bigger(d, tail)) tail = d;
    }
    const Length periodic = base + tail;
    if (bigger(periodic, best)) best = periodic;
    out.sup_displacement = best;
  } else {
    L1Verdict::Divergence d;
    d.k = u.size();
    d.l = u.size() + 2 * v.size();
    d.distance = T.displacement(v.power(2));
    d.period_length = tl;
    out.divergence = d;
  }
  return out;
}

bool verify_l1(const L1Verdict& verdict, const Ray& r, const TreeModel& T) {
  const L1Verdict again = l1_test(r, T);
  if (again.member != verdict.member) return false;
  if (verdict.member) {
    if (!verdict.sup_displacement) return false;
    // every prefix up to three periods past the prefix stays under the bound
    const std::size_t n = r.prefix().size() + 3 * r.period().size();
    for (std::size_t k = 0; k <= n; ++k) {
      if (!at_most(T.displacement(r.initial(k)), *verdict.sup_displacement, 1e-9)) return false;
    }
    return true;
  }
  if (!verdict.divergence) return false;
  const auto& d = *verdict.divergence;
  const Word step = r.initial(d.k).inverse() * r.initial(d.l);
  const Length measured = T.displacement(step);
  if (measured.is_exact) {
    return measured.exact == d.distance.exact && d.distance.exact >= 2 * d.period_length.exact &&
           d.period_length.exact > Rational(0);
  }
  return std::abs(measured.value - d.distance.value) <= 1e-9 + measured.error + d.distance.error &&
         d.distance.value + d.distance.error >= 2 * d.period_length.value - d.period_length.error;
}

QPoint q_point(const Ray& r, const TreeModel& T) {
  require_exact(T);
  if (!l1_test(r, T).member) throw std::invalid_argument("ray is not in L¹(T)");
  return QPoint{r.prefix(), r.period(), T.id()};
}

Length q_distance(const QPoint& p, const QPoint& q, const TreeModel& T) {
  require_exact(T);
  if (p.model != T.id() || q.model != T.id()) throw ModelError("Q-points belong to another model");
  const Word k = p.translate.inverse() * q.translate;
  const Rational r = exact_displacement(T, p.elliptic) / 2;
  const Rational s = exact_displacement(T, q.elliptic) / 2;
  Rational best(0);
  bool first = true;
  for (int i = 0; i <= 1; ++i) {
    for (int j = 0; j <= 1; ++j) {
      const Rational d = exact_displacement(T, p.elliptic.power(-i) * k * q.elliptic.power(j));
      if (first || d > best) best = d;
      first = false;
    }
  }
  return Length::of(best - r - s);
}

bool q_equal(const QPoint& p, const QPoint& q, const TreeModel& T) { return q_distance(p, q, T).exact == Rational(0); }

Length q_distance_to_orbit(const QPoint& p, const Word& h, const TreeModel& T) {
  return q_distance(QPoint{h, Word(), T.id()}, p, T);
}

QPairVerdict q_pair_test(const Leaf& leaf, const TreeModel& T, const LaminaryLanguage* language) {
  if (!T.exact()) {
    if (!language) throw std::invalid_argument("limit trees need the l_omega language for the Q-pair test");
    const WordSet central = subwords(rho(leaf).central(language->depth()), language->depth());
    const bool pass = std::all_of(central.begin(), central.end(), [&](const Word& w) { return language->contains(w); });
    return {pass, false};
  }
  if (!l1_test(leaf.left(), T).member || !l1_test(leaf.right(), T).member) return {false, true};
  return {q_equal(q_point(leaf.left(), T), q_point(leaf.right(), T), T), true};
}

TrapReport q_trap_check(const Ray& r, const TreeModel& T, std::size_t k_begin, std::size_t k_end) {
  require_exact(T);
  if (k_end < k_begin) throw std::invalid_argument("empty k range");
  const QPoint q = q_point(r, T);
  TrapReport out;
  out.k_begin = k_begin;
  out.bound = 3 * T.bbt_bound();
  const double bound = to_double(out.bound.exact);
  std::optional<std::size_t> from;
  for (std::size_t k = k_begin; k <= k_end; ++k) {
    const Length d = q_distance_to_orbit(q, r.initial(k), T);
    out.distances.push_back(d);
    if (d.exact <= out.bound.exact) {
      if (!from) from = k;
    } else {
      from.reset();
    }
    if (bound > 0) out.max_ratio = std::max(out.max_ratio, to_double(d.exact) / bound);
  }
  out.holds_from = from;
  return out;
}

// ---------------------------------------------------------------- Q-classes

std::vector<std::vector<Ray>> q_classes(const std::vector<Ray>& rays, const TreeModel& T, int jobs) {
  require_exact(T);
  std::vector<Ray> sorted = rays;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  // distances to a few orbit points separate most Q-points; equal fingerprints are
  // then compared exactly
  std::vector<Word> probes{Word()};
  for (int k = 0; k < 2 * T.basis().rank(); ++k) probes.push_back(Word::letter(letter_from_key(k)));
  using Fingerprint = std::vector<Rational>;
  struct Entry {
    bool member = false;
    Fingerprint fp;
  };
  auto entries = parallel_map<Entry>(sorted.size(), jobs, [&](std::size_t i) {
    Entry e;
    if (!l1_test(sorted[i], T).member) return e;
    e.member = true;
    const QPoint q = q_point(sorted[i], T);
    for (const auto& h : probes) e.fp.push_back(q_distance_to_orbit(q, h, T).exact);
    return e;
  });
  std::map<Fingerprint, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (entries[i].member) buckets[entries[i].fp].push_back(i);
  }
  std::vector<std::vector<std::size_t>> groups;
  for (auto& [fp, idx] : buckets) {
    if (idx.size() > 1) groups.push_back(std::move(idx));
  }
  // within a bucket, each point joins the first class whose representative it equals
  auto split = parallel_map<std::vector<std::vector<std::size_t>>>(groups.size(), jobs, [&](std::size_t g) {
    std::vector<std::vector<std::size_t>> parts;
    std::vector<QPoint> reps;
    for (std::size_t i : groups[g]) {
      const QPoint q = q_point(sorted[i], T);
      std::size_t c = 0;
      while (c < reps.size() && !q_equal(reps[c], q, T)) ++c;
      if (c == reps.size()) {
        reps.push_back(q);
        parts.emplace_back();
      }
      parts[c].push_back(i);
    }
    std::erase_if(parts, [](const auto& p) { return p.size() < 2; });
    return parts;
  });
  std::vector<std::vector<Ray>> classes;
  for (auto& parts : split) {
    for (auto& members : parts) {
      std::vector<Ray> c;
      for (std::size_t i : members) c.push_back(sorted[i]);
      classes.push_back(std::move(c));
    }
  }
  std::sort(classes.begin(), classes.end());
  return classes;
}

namespace {

/// Rays sharing their first p letters, split by the next letter. Leaves (X, X') that
/// branch here have central window inverse(X[p..p+d)) · X'[p..p+d), so only the
/// continuations of each branch are needed.
void branch_windows(std::vector<const Ray*>& group, std::size_t p, std::size_t depth, WordSet& out) {
  std::map<Letter, std::vector<const Ray*>> children;
  for (const Ray* r : group) children[r->at(p)].push_back(r);
  if (children.size() > 1) {
    // continuation prefixes of length 1..depth per branch
    std::vector<std::vector<WordSet>> cont;
    for (const auto& [x, rays] : children) {
      std::vector<WordSet> by_length(depth + 1);
      for (const Ray* r : rays) {
        const Word c = r->tail(p).initial(depth);
        for (std::size_t k = 1; k <= depth; ++k) by_length[k].insert(c.prefix(k));
      }
      for (const auto& w : by_length[depth]) {
        WordSet f = subwords(w, depth);
        out.insert(f.begin(), f.end());
      }
      cont.push_back(std::move(by_length));
    }
    for (std::size_t a = 0; a < cont.size(); ++a) {
      for (std::size_t b = 0; b < cont.size(); ++b) {
        if (a == b) continue;
        for (std::size_t i = 1; i < depth; ++i) {
          for (std::size_t j = 1; i + j <= depth; ++j) {
            for (const auto& s : cont[a][i]) {
              const Word left = s.inverse();
              for (const auto& t : cont[b][j]) out.insert(left * t);
            }
          }
        }
      }
    }
  }
  for (auto& [x, rays] : children) {
    if (rays.size() > 1) branch_windows(rays, p + 1, depth, out);
  }
}

}  // namespace

LaminaryLanguage q_leaf_language(const Basis& basis, const std::vector<std::vector<Ray>>& classes, std::size_t depth,
                                 int jobs) {
  if (depth == 0) throw std::invalid_argument("depth must be positive");
  auto parts = parallel_map<WordSet>(classes.size(), jobs, [&](std::size_t c) {
    std::vector<const Ray*> group;
    for (const auto& r : classes[c]) group.push_back(&r);
    WordSet out;
    branch_windows(group, 0, depth, out);
    return out;
  });
  WordSet all;
  std::size_t leaves = 0;
  for (const auto& c : classes) leaves += c.size() * (c.size() - 1);
  for (auto& p : parts) all.insert(p.begin(), p.end());
  return LaminaryLanguage(basis, depth, std::move(all),
                          {{"construction", "q_leaves"}, {"classes", classes.size()}, {"leaves", leaves}});
}

}  // namespace dlam
