#include "dlam/tree_model.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>

namespace dlam {

Length TreeModel::bbt_bound() const {
  Length total = Length::of(Rational(0));
  for (int i = 0; i < basis().rank(); ++i) total = total + displacement(Word::letter(i + 1));
  return total;
}

Length TreeModel::translation_length(const Word& w) const {
  if (w.empty()) throw std::invalid_argument("translation length of the identity is undefined here");
  return translation_length(CyclicWord(w));
}

// ---------------------------------------------------------------- Stallings folding

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    return true;
  }
};

}  // namespace

bool generates_free_group(const std::vector<std::vector<Letter>>& words, int rank) {
  if (rank == 0) return true;
  struct Arrow {
    int from;
    Letter label;
    int to;
  };
  std::vector<Arrow> arrows;
  int vertices = 1;
  for (const auto& raw : words) {
    auto w = free_reduce(raw);
    if (w.empty()) continue;
    int cur = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      int next = i + 1 == w.size() ? 0 : vertices++;
      arrows.push_back({cur, w[i], next});
      cur = next;
    }
  }
  UnionFind uf(vertices);
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::pair<int, Letter>, int> out;
    for (const auto& a : arrows) {
      for (auto [u, l, v] : {std::tuple{a.from, a.label, a.to}, std::tuple{a.to, inverse(a.label), a.from}}) {
        auto key = std::pair{uf.find(u), l};
        auto [it, fresh] = out.emplace(key, uf.find(v));
        if (!fresh && uf.find(it->second) != uf.find(v)) {
          uf.unite(it->second, v);
          changed = true;
        }
      }
    }
  }
  for (int v = 0; v < vertices; ++v) {
    if (uf.find(v) != 0) return false;
  }
  std::set<Letter> labels;
  for (const auto& a : arrows) labels.insert(a.label > 0 ? a.label : -a.label);
  return static_cast<int>(labels.size()) == rank;
}

// ---------------------------------------------------------------- marked graphs

MarkedMetricGraph::MarkedMetricGraph(Basis basis, std::vector<std::string> vertices, std::vector<Edge> edges,
                                     std::vector<std::vector<Letter>> marking, int base, std::string name)
    : basis_(std::move(basis)),
      name_(std::move(name)),
      vertices_(std::move(vertices)),
      edges_(std::move(edges)),
      marking_(std::move(marking)),
      base_(base) {
  const int nv = static_cast<int>(vertices_.size());
  const int ne = static_cast<int>(edges_.size());
  if (nv == 0) throw ModelError("graph has no vertices");
  if (base_ < 0 || base_ >= nv) throw ModelError("base vertex out of range");
  bool positive = false;
  std::set<std::string> ids;
  for (const auto& e : edges_) {
    if (e.from < 0 || e.from >= nv || e.to < 0 || e.to >= nv) throw ModelError("edge '" + e.id + "' has a bad endpoint");
    if (e.length < Rational(0)) throw ModelError("edge '" + e.id + "' has negative length");
    if (!ids.insert(e.id).second) throw ModelError("duplicate edge id '" + e.id + "'");
    if (e.length > Rational(0)) positive = true;
  }
  if (!positive) throw ModelError("degenerate tree: every edge has length zero");
  if (marking_.size() != static_cast<std::size_t>(basis_.rank())) throw ModelError("marking needs one loop per letter");

  auto start = [&](Letter e) { return e > 0 ? edges_[e - 1].from : edges_[-e - 1].to; };
  auto end = [&](Letter e) { return e > 0 ? edges_[e - 1].to : edges_[-e - 1].from; };
  for (std::size_t i = 0; i < marking_.size(); ++i) {
    const auto& path = marking_[i];
    const std::string& letter = basis_.letters()[i];
    if (path.empty()) throw ModelError("marking of '" + letter + "' is an empty loop");
    int cur = base_;
    for (Letter e : path) {
      if (e == 0 || (e > 0 ? e : -e) > ne) throw ModelError("marking of '" + letter + "' uses an unknown edge");
      if (start(e) != cur) throw ModelError("marking of '" + letter + "' is not an edge path");
      cur = end(e);
    }
    if (cur != base_) throw ModelError("marking of '" + letter + "' is not a loop at the base vertex");
  }

  // spanning tree from the base vertex
  std::vector<std::vector<std::pair<int, Letter>>> adj(static_cast<std::size_t>(nv));
  for (int i = 0; i < ne; ++i) {
    adj[static_cast<std::size_t>(edges_[static_cast<std::size_t>(i)].from)].push_back({edges_[static_cast<std::size_t>(i)].to, i + 1});
    adj[static_cast<std::size_t>(edges_[static_cast<std::size_t>(i)].to)].push_back({edges_[static_cast<std::size_t>(i)].from, -(i + 1)});
  }
  std::vector<bool> seen(static_cast<std::size_t>(nv), false);
  std::vector<bool> tree_edge(static_cast<std::size_t>(ne), false);
  std::queue<int> q;
  q.push(base_);
  seen[static_cast<std::size_t>(base_)] = true;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (auto [w, e] : adj[static_cast<std::size_t>(v)]) {
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = true;
      tree_edge[static_cast<std::size_t>((e > 0 ? e : -e) - 1)] = true;
      q.push(w);
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw ModelError("graph is not connected");
  const int rank = ne - nv + 1;
  if (rank != basis_.rank()) {
    throw ModelError("graph has rank " + std::to_string(rank) + " but the basis has rank " +
                     std::to_string(basis_.rank()));
  }
  std::vector<Letter> generator(static_cast<std::size_t>(ne), 0);
  int next = 1;
  for (int i = 0; i < ne; ++i) {
    if (!tree_edge[static_cast<std::size_t>(i)]) generator[static_cast<std::size_t>(i)] = next++;
  }
  std::vector<std::vector<Letter>> loops;
  for (const auto& path : marking_) {
    std::vector<Letter> w;
    for (Letter e : path) {
      Letter g = generator[static_cast<std::size_t>((e > 0 ? e : -e) - 1)];
      if (g != 0) w.push_back(e > 0 ? g : -g);
    }
    loops.push_back(std::move(w));
  }
  if (!generates_free_group(loops, rank)) throw ModelError("marking does not generate the fundamental group");
}

MarkedMetricGraph MarkedMetricGraph::rose(const Basis& basis, const std::vector<Rational>& lengths, std::string name) {
  if (lengths.size() != static_cast<std::size_t>(basis.rank())) throw ModelError("rose needs one length per letter");
  std::vector<Edge> edges;
  std::vector<std::vector<Letter>> marking;
  for (int i = 0; i < basis.rank(); ++i) {
    edges.push_back({basis.letters()[static_cast<std::size_t>(i)], 0, 0, lengths[static_cast<std::size_t>(i)]});
    marking.push_back({i + 1});
  }
  return MarkedMetricGraph(basis, {"v"}, std::move(edges), std::move(marking), 0, std::move(name));
}

int MarkedMetricGraph::edge_index(std::string_view id) const {
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i].id == id) return static_cast<int>(i);
  }
  throw ModelError("unknown edge '" + std::string(id) + "'");
}

std::vector<std::string> MarkedMetricGraph::zero_length_edges() const {
  std::vector<std::string> out;
  for (const auto& e : edges_) {
    if (e.length == Rational(0)) out.push_back(e.id);
  }
  return out;
}

std::vector<Letter> MarkedMetricGraph::edge_path(const Word& w) const {
  std::vector<Letter> raw;
  for (Letter x : w) {
    if (!basis_.contains(x)) throw BasisMismatch("word uses a letter outside the model basis");
    const auto& p = marking_[static_cast<std::size_t>(generator_index(x))];
    if (x > 0) {
      raw.insert(raw.end(), p.begin(), p.end());
    } else {
      for (auto it = p.rbegin(); it != p.rend(); ++it) raw.push_back(inverse(*it));
    }
  }
  return free_reduce(raw);
}

Rational MarkedMetricGraph::path_length(std::span<const Letter> path) const {
  Rational total(0);
  for (Letter e : path) total += edges_[static_cast<std::size_t>(generator_index(e))].length;
  return total;
}

Length MarkedMetricGraph::translation_length(const CyclicWord& w) const {
  if (w.empty()) throw std::invalid_argument("translation length of the identity is undefined here");
  auto path = edge_path(w.word());
  std::size_t lo = 0;
  std::size_t hi = path.size();
  while (hi - lo >= 2 && path[lo] == inverse(path[hi - 1])) {
    ++lo;
    --hi;
  }
  return Length::of(path_length(std::span<const Letter>(path).subspan(lo, hi - lo)));
}

Length MarkedMetricGraph::displacement(const Word& w) const {
  auto path = edge_path(w);
  return Length::of(path_length(path));
}

nlohmann::json MarkedMetricGraph::describe() const {
  nlohmann::json j;
  j["type"] = "graph";
  j["name"] = name_;
  j["basis"] = basis_.letters();
  j["vertices"] = vertices_;
  j["base"] = vertices_[static_cast<std::size_t>(base_)];
  auto edges = nlohmann::json::array();
  for (const auto& e : edges_) {
    edges.push_back({{"id", e.id},
                     {"from", vertices_[static_cast<std::size_t>(e.from)]},
                     {"to", vertices_[static_cast<std::size_t>(e.to)]},
                     {"length", format_rational(e.length)}});
  }
  j["edges"] = edges;
  nlohmann::json marking = nlohmann::json::object();
  for (std::size_t i = 0; i < marking_.size(); ++i) {
    auto path = nlohmann::json::array();
    for (Letter e : marking_[i]) path.push_back(edges_[static_cast<std::size_t>(generator_index(e))].id + (e < 0 ? "'" : ""));
    marking[basis_.letters()[i]] = path;
  }
  j["marking"] = marking;
  j["zero_length_edges"] = zero_length_edges();
  return j;
}

MarkedMetricGraph contract(const MarkedMetricGraph& graph, const std::set<std::string>& ids) {
  auto edges = graph.edges();
  for (const auto& id : ids) edges[static_cast<std::size_t>(graph.edge_index(id))].length = 0;
  std::string name = graph.id();
  if (!ids.empty()) {
    name += "/{";
    bool first = true;
    for (const auto& id : ids) {
      name += (first ? "" : ",") + id;
      first = false;
    }
    name += "}";
  }
  return MarkedMetricGraph(graph.basis(), graph.vertices(), std::move(edges), graph.marking(), graph.base(), name);
}

// ---------------------------------------------------------------- splitting tree

SplittingTree::SplittingTree(Basis basis, const std::string& side1, const std::string& side2,
                             const std::string& shared, Rational edge_length, int basepoint_side, std::string name)
    : basis_(std::move(basis)),
      name_(std::move(name)),
      side_(static_cast<std::size_t>(basis_.rank()), -1),
      edge_length_(edge_length),
      basepoint_side_(basepoint_side) {
  if (edge_length_ <= Rational(0)) throw ModelError("edge length must be positive");
  if (basepoint_side_ != 1 && basepoint_side_ != 2) throw ModelError("basepoint side must be 1 or 2");
  shared_ = basis_.letter(shared);
  auto mark = [&](const std::string& letters, int s) {
    Basis side = Basis::parse(letters);
    for (const auto& l : side.letters()) {
      auto& slot = side_[static_cast<std::size_t>(generator_index(basis_.letter(l)))];
      if (slot == -1 || slot == s) {
        slot = s;
      } else {
        slot = 0;
      }
    }
  };
  mark(side1, 1);
  mark(side2, 2);
  for (std::size_t i = 0; i < side_.size(); ++i) {
    if (side_[i] == -1) throw ModelError("letter '" + basis_.letters()[i] + "' is on neither side");
    if (side_[i] == 0 && static_cast<Letter>(i + 1) != shared_) {
      throw ModelError("sides may only share the letter '" + shared + "'");
    }
  }
  if (side_[static_cast<std::size_t>(generator_index(shared_))] != 0) {
    throw ModelError("shared letter '" + shared + "' must lie on both sides");
  }
  for (int s : {1, 2}) {
    if (std::count(side_.begin(), side_.end(), s) == 0) throw ModelError("each side needs a letter besides the shared one");
  }
}

Length SplittingTree::translation_length(const CyclicWord& w) const {
  if (w.empty()) throw std::invalid_argument("translation length of the identity is undefined here");
  std::vector<int> sides;
  for (Letter x : w.word()) {
    if (int s = side(x); s != 0) sides.push_back(s);
  }
  std::int64_t alternations = 0;
  for (std::size_t i = 0; i < sides.size(); ++i) {
    if (sides[i] != sides[(i + 1) % sides.size()]) ++alternations;
  }
  return Length::of(edge_length_ * alternations);
}

Length SplittingTree::displacement(const Word& w) const {
  const int far = 3 - basepoint_side_;
  std::int64_t blocks = 0;
  int previous = 0;
  for (Letter x : w) {
    if (!basis_.contains(x)) throw BasisMismatch("word uses a letter outside the model basis");
    int s = side(x);
    if (s == 0) continue;
    if (s == far && previous != far) ++blocks;
    previous = s;
  }
  return Length::of(edge_length_ * (2 * blocks));
}

nlohmann::json SplittingTree::describe() const {
  std::string s1, s2;
  for (std::size_t i = 0; i < side_.size(); ++i) {
    const auto& l = basis_.letters()[i];
    if (side_[i] != 2) s1 += (s1.empty() ? "" : " ") + l;
    if (side_[i] != 1) s2 += (s2.empty() ? "" : " ") + l;
  }
  return {{"type", "splitting"},
          {"name", name_},
          {"basis", basis_.letters()},
          {"side1", s1},
          {"side2", s2},
          {"shared", basis_.format(shared_)},
          {"edge_length", format_rational(edge_length_)},
          {"basepoint_side", basepoint_side_}};
}

SplittingTree SplittingTree::rescaled(Rational edge_length) const {
  SplittingTree out = *this;
  if (edge_length <= Rational(0)) throw ModelError("edge length must be positive");
  out.edge_length_ = edge_length;
  return out;
}

// ---------------------------------------------------------------- pullback

PullbackTree::PullbackTree(ModelPtr base, Automorphism alpha) : base_(std::move(base)), alpha_(std::move(alpha)) {
  if (!base_) throw std::invalid_argument("pullback of a null model");
  if (!(alpha_.source() == base_->basis()) || !(alpha_.target() == base_->basis())) {
    throw BasisMismatch("pullback needs an automorphism of the model's basis");
  }
}

std::string PullbackTree::id() const { return "pullback(" + base_->id() + ")"; }

Length PullbackTree::translation_length(const CyclicWord& w) const {
  return base_->translation_length(CyclicWord(alpha_.apply(w.word())));
}

Length PullbackTree::displacement(const Word& w) const { return base_->displacement(alpha_.apply(w)); }

nlohmann::json PullbackTree::describe() const {
  nlohmann::json images = nlohmann::json::object();
  for (int i = 0; i < alpha_.source().rank(); ++i) {
    images[alpha_.source().letters()[static_cast<std::size_t>(i)]] =
        alpha_.target().format(alpha_.images()[static_cast<std::size_t>(i)]);
  }
  return {{"type", "pullback"}, {"base", base_->describe()}, {"images", images}};
}

ModelPtr pullback(ModelPtr base, const Automorphism& alpha) {
  return std::make_shared<PullbackTree>(std::move(base), alpha);
}

}  // namespace dlam
