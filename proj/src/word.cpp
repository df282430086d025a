#include "dlam/word.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <unordered_set>

namespace dlam {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

std::vector<Letter> rotate_left(const std::vector<Letter>& v, std::size_t k) {
  std::vector<Letter> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[(i + k) % v.size()];
  return out;
}

bool less_letters(std::span<const Letter> a, std::span<const Letter> b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return letter_key(a[i]) < letter_key(b[i]);
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------- Basis

Basis::Basis(std::string name, std::vector<std::string> letters)
    : name_(std::move(name)), letters_(std::move(letters)) {
  if (letters_.size() < 2) throw FormatError("basis needs at least two letters");
  std::unordered_set<std::string> seen;
  single_char_ = true;
  for (const auto& l : letters_) {
    if (l.empty() || !std::all_of(l.begin(), l.end(), is_ident)) {
      throw FormatError("invalid basis letter '" + l + "'");
    }
    if (!seen.insert(l).second) throw FormatError("duplicate basis letter '" + l + "'");
    if (l.size() != 1) single_char_ = false;
  }
  if (seen.count("1") != 0) throw FormatError("'1' is reserved for the identity");
}

Basis Basis::parse(std::string_view spec) {
  std::vector<std::string> letters;
  const bool separated = std::any_of(spec.begin(), spec.end(), [](char c) { return is_space(c) || c == ','; });
  if (separated) {
    std::string cur;
    for (char c : spec) {
      if (is_space(c) || c == ',') {
        if (!cur.empty()) letters.push_back(std::move(cur));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) letters.push_back(std::move(cur));
  } else {
    for (char c : spec) letters.emplace_back(1, c);
  }
  return Basis(std::string(spec), std::move(letters));
}

Letter Basis::letter(std::string_view symbol) const {
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (letters_[i] == symbol) return static_cast<Letter>(i + 1);
  }
  throw FormatError("unknown letter '" + std::string(symbol) + "' for basis '" + name_ + "'");
}

std::string Basis::format(Letter x) const {
  if (!contains(x)) throw FormatError("letter outside basis '" + name_ + "'");
  std::string s = letters_[generator_index(x)];
  if (x < 0) s.push_back('\'');
  return s;
}

std::vector<Letter> Basis::parse_letters(std::string_view text) const {
  std::vector<Letter> out;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && (is_space(text[i]) || text[i] == '*' || text[i] == '.')) ++i;
  };
  skip();
  if (text.substr(i) == "1") return out;
  while (i < text.size()) {
    std::size_t start = i;
    if (single_char_) {
      ++i;
    } else {
      while (i < text.size() && is_ident(text[i])) ++i;
    }
    if (i == start) throw FormatError("unexpected character in word: '" + std::string(text) + "'");
    Letter x = letter(text.substr(start, i - start));
    long exponent = 1;
    while (i < text.size() && (text[i] == '\'' || text[i] == '^')) {
      if (text[i] == '\'') {
        exponent = -exponent;
        ++i;
        continue;
      }
      ++i;
      bool negative = false;
      if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        negative = text[i] == '-';
        ++i;
      }
      std::size_t digits = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])) != 0) ++i;
      if (digits == i) throw FormatError("missing exponent in '" + std::string(text) + "'");
      long n = std::stol(std::string(text.substr(digits, i - digits)));
      exponent *= negative ? -n : n;
    }
    const Letter y = exponent < 0 ? inverse(x) : x;
    for (long k = 0; k < (exponent < 0 ? -exponent : exponent); ++k) out.push_back(y);
    skip();
  }
  return out;
}

Word Basis::parse_word(std::string_view text) const { return Word(parse_letters(text)); }

std::string Basis::format(std::span<const Letter> letters) const {
  if (letters.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (i != 0) out.push_back(' ');
    out += format(letters[i]);
  }
  return out;
}

std::string Basis::format(const Word& w) const { return format(std::span<const Letter>(w.letters())); }

// ---------------------------------------------------------------- Word

std::vector<Letter> free_reduce(std::span<const Letter> letters) {
  std::vector<Letter> stack;
  stack.reserve(letters.size());
  for (Letter x : letters) {
    if (x == 0) throw FormatError("letter 0 is not a valid letter");
    if (!stack.empty() && stack.back() == inverse(x)) {
      stack.pop_back();
    } else {
      stack.push_back(x);
    }
  }
  return stack;
}

Word::Word(std::span<const Letter> letters) : letters_(free_reduce(letters)) {}

Word::Word(std::initializer_list<Letter> letters)
    : letters_(free_reduce(std::span<const Letter>(letters.begin(), letters.size()))) {}

Word Word::from_reduced(std::vector<Letter> letters) {
  Word w;
  w.letters_ = std::move(letters);
  return w;
}

Word Word::inverse() const {
  std::vector<Letter> out(letters_.rbegin(), letters_.rend());
  for (auto& x : out) x = dlam::inverse(x);
  return from_reduced(std::move(out));
}

Word Word::power(int n) const {
  const Word base = n < 0 ? inverse() : *this;
  Word out;
  for (int k = 0; k < (n < 0 ? -n : n); ++k) out = out * base;
  return out;
}

Word Word::prefix(std::size_t n) const {
  n = std::min(n, size());
  return from_reduced(std::vector<Letter>(letters_.begin(), letters_.begin() + static_cast<long>(n)));
}

Word Word::suffix(std::size_t n) const {
  n = std::min(n, size());
  return from_reduced(std::vector<Letter>(letters_.end() - static_cast<long>(n), letters_.end()));
}

Word Word::factor(std::size_t pos, std::size_t len) const {
  if (pos + len > size()) throw std::out_of_range("factor outside word");
  auto first = letters_.begin() + static_cast<long>(pos);
  return from_reduced(std::vector<Letter>(first, first + static_cast<long>(len)));
}

bool Word::has_factor(const Word& u) const {
  if (u.empty()) return true;
  return std::search(letters_.begin(), letters_.end(), u.letters_.begin(), u.letters_.end()) != letters_.end();
}

bool Word::is_cyclically_reduced() const noexcept {
  return letters_.size() <= 1 || letters_.front() != dlam::inverse(letters_.back());
}

int Word::max_generator() const noexcept {
  int m = -1;
  for (Letter x : letters_) m = std::max(m, generator_index(x));
  return m;
}

Word operator*(const Word& u, const Word& v) {
  std::size_t c = cancellation(u, v);
  std::vector<Letter> out;
  out.reserve(u.size() + v.size() - 2 * c);
  out.insert(out.end(), u.letters_.begin(), u.letters_.end() - static_cast<long>(c));
  out.insert(out.end(), v.letters_.begin() + static_cast<long>(c), v.letters_.end());
  return Word::from_reduced(std::move(out));
}

std::strong_ordering Word::operator<=>(const Word& other) const {
  if (letters_ == other.letters_) return std::strong_ordering::equal;
  return less_letters(letters_, other.letters_) ? std::strong_ordering::less : std::strong_ordering::greater;
}

std::size_t cancellation(const Word& u, const Word& v) {
  std::size_t c = 0;
  while (c < u.size() && c < v.size() && u[u.size() - 1 - c] == inverse(v[c])) ++c;
  return c;
}

Word chop(const Word& w, std::size_t k) {
  if (w.size() <= 2 * k) return Word();
  return w.factor(k, w.size() - 2 * k);
}

std::size_t WordHash::operator()(const Word& w) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (Letter x : w) {
    h ^= static_cast<std::size_t>(x + 1024);
    h *= 1099511628211ull;
  }
  return h;
}

// ---------------------------------------------------------------- cyclic words

Word least_rotation(const Word& w) {
  const auto& v = w.letters();
  std::size_t best = 0;
  const std::size_t n = v.size();
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      Letter a = v[(r + i) % n];
      Letter b = v[(best + i) % n];
      if (a != b) {
        if (letter_key(a) < letter_key(b)) best = r;
        break;
      }
    }
  }
  return Word::from_reduced(rotate_left(v, best));
}

bool is_canonical_cyclic(std::span<const Letter> v) {
  const std::size_t n = v.size();
  if (n == 0) return false;
  if (n > 1 && v.front() == inverse(v.back())) return false;
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      Letter a = v[(r + i) % n];
      Letter b = v[i];
      if (a != b) {
        if (letter_key(a) < letter_key(b)) return false;
        break;
      }
    }
  }
  return true;
}

ConjugacyDecomposition cyclic_decompose(const Word& w) {
  if (w.empty()) throw std::invalid_argument("the identity has no conjugacy decomposition");
  std::size_t k = 0;
  const std::size_t n = w.size();
  while (2 * k + 1 < n && w[k] == inverse(w[n - 1 - k])) ++k;
  return {w.prefix(k), w.factor(k, n - 2 * k)};
}

Word primitive_root(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = w[i] == w[i - p];
    if (periodic) return w.prefix(p);
  }
  return w;
}

CyclicWord::CyclicWord(const Word& w) {
  if (w.empty()) throw std::invalid_argument("the identity has no cyclic word");
  word_ = least_rotation(cyclic_decompose(w).core);
}

CyclicWord CyclicWord::root() const {
  CyclicWord r;
  r.word_ = primitive_root(word_);
  return r;
}

// ---------------------------------------------------------------- factor sets

WordSet subwords(const Word& w, std::size_t depth) {
  WordSet out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t len = 1; len <= depth && i + len <= w.size(); ++len) {
      Word f = w.factor(i, len);
      out.insert(f.inverse());
      out.insert(std::move(f));
    }
  }
  return out;
}

WordSet periodic_factors(const Word& period, std::size_t depth) {
  WordSet out;
  const std::size_t n = period.size();
  if (n == 0) return out;
  std::vector<Letter> buf;
  for (std::size_t i = 0; i < n; ++i) {
    buf.clear();
    for (std::size_t len = 1; len <= depth; ++len) {
      buf.push_back(period[(i + len - 1) % n]);
      Word f = Word::from_reduced(buf);
      out.insert(f.inverse());
      out.insert(std::move(f));
    }
  }
  return out;
}

// ---------------------------------------------------------------- rays

Ray::Ray(const Word& prefix, const Word& period) {
  if (period.empty()) throw std::invalid_argument("ray period must be nontrivial");
  auto dec = cyclic_decompose(period);
  std::vector<Letter> u = (prefix * dec.conjugator).letters();
  std::vector<Letter> v = primitive_root(dec.core).letters();
  while (!u.empty() && u.back() == inverse(v.front())) {
    u.pop_back();
    v = rotate_left(v, 1);
  }
  while (!u.empty() && u.back() == v.back()) {
    u.pop_back();
    v = rotate_left(v, v.size() - 1);
  }
  prefix_ = Word::from_reduced(std::move(u));
  period_ = Word::from_reduced(std::move(v));
}

Letter Ray::at(std::size_t i) const noexcept {
  if (i < prefix_.size()) return prefix_[i];
  return period_[(i - prefix_.size()) % period_.size()];
}

Word Ray::initial(std::size_t n) const {
  std::vector<Letter> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = at(i);
  return Word::from_reduced(std::move(out));
}

Ray Ray::tail(std::size_t n) const {
  if (n <= prefix_.size()) return Ray(prefix_.suffix(prefix_.size() - n), period_);
  const std::size_t shift = (n - prefix_.size()) % period_.size();
  return Ray(Word(), Word::from_reduced(rotate_left(period_.letters(), shift)));
}

std::size_t Ray::common_prefix(const Ray& other) const {
  const std::size_t bound =
      std::max(prefix_.size(), other.prefix_.size()) + period_.size() + other.period_.size();
  for (std::size_t i = 0; i < bound; ++i) {
    if (at(i) != other.at(i)) return i;
  }
  throw InvalidLeaf("rays coincide");
}

std::strong_ordering Ray::operator<=>(const Ray& other) const {
  if (auto c = prefix_ <=> other.prefix_; c != 0) return c;
  return period_ <=> other.period_;
}

std::size_t RayHash::operator()(const Ray& r) const noexcept {
  WordHash h;
  return h(r.prefix()) * 31 + h(r.period());
}

WordSet recurrent_factors(const Ray& r, std::size_t depth) { return periodic_factors(r.period(), depth); }

Ray translate(const Word& g, const Ray& r) { return Ray(g * r.prefix(), r.period()); }

// ---------------------------------------------------------------- leaves

BiinfiniteWord::BiinfiniteWord(Ray left_tail, Ray right_tail)
    : left_(std::move(left_tail)), right_(std::move(right_tail)) {
  if (left_.at(0) == right_.at(0)) throw InvalidLeaf("biinfinite word is not reduced at the junction");
}

Letter BiinfiniteWord::at(long i) const noexcept {
  if (i < 0) return inverse(left_.at(static_cast<std::size_t>(-i - 1)));
  return right_.at(static_cast<std::size_t>(i));
}

Word BiinfiniteWord::window(long from, std::size_t length) const {
  std::vector<Letter> out(length);
  for (std::size_t k = 0; k < length; ++k) out[k] = at(from + static_cast<long>(k));
  return Word::from_reduced(std::move(out));
}

WordSet BiinfiniteWord::factors(std::size_t depth) const {
  WordSet out;
  const long lo = -static_cast<long>(left_.prefix().size() + left_.period().size() + depth);
  const long hi = static_cast<long>(right_.prefix().size() + right_.period().size() + depth);
  std::vector<Letter> buf;
  for (long s = lo; s < hi; ++s) {
    buf.clear();
    for (std::size_t len = 1; len <= depth; ++len) {
      buf.push_back(at(s + static_cast<long>(len) - 1));
      Word f = Word::from_reduced(buf);
      out.insert(f.inverse());
      out.insert(std::move(f));
    }
  }
  return out;
}

Leaf::Leaf(Ray left, Ray right) : left_(std::move(left)), right_(std::move(right)) {
  if (left_ == right_) throw InvalidLeaf("a leaf needs two distinct rays");
}

Leaf Leaf::translate(const Word& g) const { return Leaf(dlam::translate(g, left_), dlam::translate(g, right_)); }

BiinfiniteWord rho(const Leaf& leaf) {
  const std::size_t h = leaf.left().common_prefix(leaf.right());
  return BiinfiniteWord(leaf.left().tail(h), leaf.right().tail(h));
}

}  // namespace dlam
