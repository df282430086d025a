#include "dlam/automorphism.hpp"

#include <algorithm>
#include <sstream>

#include "dlam/parallel.hpp"

namespace dlam {

namespace {

void check_over(const Basis& basis, const Word& w, const char* what) {
  for (Letter x : w) {
    if (!basis.contains(x)) throw BasisMismatch(std::string(what) + " uses a letter outside basis '" + basis.name() + "'");
  }
}

Word apply_images(const std::vector<Word>& images, const Basis& source, const Word& w) {
  std::vector<Letter> out;
  for (Letter x : w) {
    if (!source.contains(x)) throw BasisMismatch("word uses a letter outside basis '" + source.name() + "'");
    const Word& img = images[static_cast<std::size_t>(generator_index(x))];
    if (x > 0) {
      out.insert(out.end(), img.begin(), img.end());
    } else {
      for (auto it = img.letters().rbegin(); it != img.letters().rend(); ++it) out.push_back(inverse(*it));
    }
  }
  return Word(out);
}

}  // namespace

Automorphism::Automorphism(Basis source, Basis target, std::vector<Word> images,
                           std::optional<std::vector<Word>> inverse_images)
    : source_(std::move(source)),
      target_(std::move(target)),
      images_(std::move(images)),
      inverse_images_(std::move(inverse_images)) {
  if (source_.rank() != target_.rank()) throw BasisMismatch("source and target bases have different rank");
  if (images_.size() != static_cast<std::size_t>(source_.rank())) {
    throw BasisMismatch("expected one image per source letter");
  }
  for (const auto& img : images_) {
    if (img.empty()) throw std::invalid_argument("generator image is trivial");
    check_over(target_, img, "image");
  }
  if (inverse_images_) {
    if (inverse_images_->size() != images_.size()) throw BasisMismatch("expected one inverse image per target letter");
    for (const auto& img : *inverse_images_) check_over(source_, img, "inverse image");
    for (int i = 0; i < source_.rank(); ++i) {
      const Word x = Word::letter(i + 1);
      if (apply_images(*inverse_images_, target_, apply_images(images_, source_, x)) != x ||
          apply_images(images_, source_, apply_images(*inverse_images_, target_, x)) != x) {
        throw std::invalid_argument("inverse images do not invert the automorphism");
      }
    }
  }
}

Automorphism Automorphism::identity(const Basis& basis) {
  std::vector<Word> images;
  for (int i = 0; i < basis.rank(); ++i) images.push_back(Word::letter(i + 1));
  return Automorphism(basis, basis, images, images);
}

Word Automorphism::apply(const Word& w) const { return apply_images(images_, source_, w); }

Ray Automorphism::apply(const Ray& r) const { return Ray(apply(r.prefix()), apply(r.period())); }

Automorphism Automorphism::inverse() const {
  if (!inverse_images_) throw std::invalid_argument("automorphism has no inverse images");
  return Automorphism(target_, source_, *inverse_images_, images_);
}

Automorphism Automorphism::power(int k) const {
  if (!(source_ == target_)) throw BasisMismatch("powers need source = target");
  Automorphism base = k < 0 ? inverse() : *this;
  Automorphism out = identity(source_);
  for (int i = 0; i < (k < 0 ? -k : k); ++i) out = compose(base, out);
  return out;
}

std::size_t Automorphism::image_volume() const {
  std::size_t s = 0;
  for (const auto& img : images_) s += img.size();
  return s;
}

std::size_t Automorphism::max_image_length() const {
  std::size_t m = 0;
  for (const auto& img : images_) m = std::max(m, img.size());
  return m;
}

bool Automorphism::is_positive() const {
  return std::all_of(images_.begin(), images_.end(),
                     [](const Word& w) { return std::all_of(w.begin(), w.end(), [](Letter x) { return x > 0; }); });
}

std::string Automorphism::canonical_text() const {
  std::ostringstream os;
  auto dump = [&](const std::vector<Word>& ws) {
    for (const auto& w : ws) {
      for (Letter x : w) os << x << ',';
      os << ';';
    }
  };
  for (const auto& l : source_.letters()) os << l << ' ';
  os << '|';
  for (const auto& l : target_.letters()) os << l << ' ';
  os << '|';
  dump(images_);
  if (inverse_images_) {
    os << '|';
    dump(*inverse_images_);
  }
  return os.str();
}

bool Automorphism::operator==(const Automorphism& other) const {
  return source_ == other.source_ && target_ == other.target_ && images_ == other.images_;
}

Automorphism compose(const Automorphism& outer, const Automorphism& inner) {
  if (!(inner.target() == outer.source())) throw BasisMismatch("cannot compose: bases do not match");
  std::vector<Word> images;
  for (const auto& img : inner.images()) images.push_back(outer.apply(img));
  std::optional<std::vector<Word>> inverse_images;
  if (outer.invertible() && inner.invertible()) {
    const Automorphism inner_inv = inner.inverse();
    std::vector<Word> inv;
    for (const auto& img : *outer.inverse_images()) inv.push_back(inner_inv.apply(img));
    inverse_images = std::move(inv);
  }
  return Automorphism(inner.source(), outer.target(), std::move(images), std::move(inverse_images));
}

// ---------------------------------------------------------------- cancellation bounds

namespace {

/// All nonempty reduced words of length <= depth over a rank-n alphabet.
std::vector<Word> reduced_words_up_to(int rank, std::size_t depth) {
  std::vector<Word> all;
  std::vector<Word> layer;
  for (int k = 0; k < 2 * rank; ++k) layer.push_back(Word::letter(letter_from_key(k)));
  for (std::size_t len = 1; len <= depth; ++len) {
    all.insert(all.end(), layer.begin(), layer.end());
    if (len == depth) break;
    std::vector<Word> next;
    for (const auto& w : layer) {
      for (int k = 0; k < 2 * rank; ++k) {
        Letter x = letter_from_key(k);
        if (x == inverse(w.back())) continue;
        std::vector<Letter> l = w.letters();
        l.push_back(x);
        next.push_back(Word::from_reduced(std::move(l)));
      }
    }
    layer = std::move(next);
  }
  return all;
}

std::size_t lcp(const std::vector<Letter>& a, const std::vector<Letter>& b) {
  std::size_t i = 0;
  while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
  return i;
}

struct Candidate {
  std::size_t value = 0;
  std::optional<std::pair<Word, Word>> witness;
};

Candidate search(const Automorphism& alpha, std::size_t depth, int jobs) {
  const int rank = alpha.source().rank();
  const std::vector<Word> words = reduced_words_up_to(rank, depth);

  // Images α(v) grouped by the first letter of v, sorted for nearest-neighbour LCP queries.
  struct Entry {
    std::vector<Letter> image;
    std::size_t index;
  };
  std::vector<std::vector<Entry>> by_first(static_cast<std::size_t>(2 * rank));
  for (std::size_t i = 0; i < words.size(); ++i) {
    by_first[static_cast<std::size_t>(letter_key(words[i].front()))].push_back({alpha.apply(words[i]).letters(), i});
  }
  for (auto& bucket : by_first) {
    std::sort(bucket.begin(), bucket.end(), [](const Entry& a, const Entry& b) {
      return a.image != b.image ? a.image < b.image : a.index < b.index;
    });
  }

  auto shard = [&](std::size_t last_key) {
    Candidate best;
    const Letter last = letter_from_key(static_cast<int>(last_key));
    for (const auto& u : words) {
      if (u.back() != last) continue;
      const std::vector<Letter> s = alpha.apply(u).inverse().letters();
      for (int k = 0; k < 2 * rank; ++k) {
        if (letter_from_key(k) == inverse(last)) continue;
        const auto& bucket = by_first[static_cast<std::size_t>(k)];
        auto it = std::lower_bound(bucket.begin(), bucket.end(), s,
                                   [](const Entry& e, const std::vector<Letter>& key) { return e.image < key; });
        for (auto cand : {it, it == bucket.begin() ? bucket.end() : std::prev(it)}) {
          if (cand == bucket.end()) continue;
          std::size_t c = lcp(s, cand->image);
          if (c > best.value || (c == best.value && !best.witness && c > 0)) {
            best.value = c;
            best.witness = std::make_pair(u, words[cand->index]);
          }
        }
      }
    }
    return best;
  };
  auto results = parallel_map<Candidate>(static_cast<std::size_t>(2 * rank), jobs, shard);
  Candidate best;
  for (auto& r : results) {
    if (r.value > best.value) best = std::move(r);
  }
  return best;
}

}  // namespace

CancellationBound cancellation_bound(const Automorphism& alpha, std::size_t depth, int jobs) {
  if (!alpha.invertible()) throw std::invalid_argument("cancellation bound needs an invertible automorphism");
  CancellationBound out;
  out.cheap_value = alpha.image_volume();
  if (depth == 0) {
    out.value = out.cheap_value;
    return out;
  }
  Candidate best = search(alpha, depth, jobs);
  out.value = best.value;
  out.kind = CancellationBound::Kind::ExactUpToDepth;
  out.depth_checked = depth;
  out.witness = std::move(best.witness);
  return out;
}

bool verify_cancellation_bound(const Automorphism& alpha, const CancellationBound& bound) {
  if (bound.kind == CancellationBound::Kind::UpperBound) return bound.value >= bound.cheap_value;
  return search(alpha, bound.depth_checked, 1).value <= bound.value;
}

}  // namespace dlam
