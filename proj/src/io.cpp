#include "dlam/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dlam {
namespace io {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
}

Basis basis_from_json(const json& j) {
  if (j.is_string()) return Basis::parse(j.get<std::string>());
  if (j.is_array()) {
    std::string spec;
    for (const auto& l : j) spec += (spec.empty() ? "" : " ") + l.get<std::string>();
    return Basis::parse(spec);
  }
  throw FormatError("basis must be a string or a list of letters");
}

json basis_to_json(const Basis& b) {
  std::string out;
  bool single = true;
  for (const auto& l : b.letters()) single = single && l.size() == 1;
  for (const auto& l : b.letters()) out += (single || out.empty() ? "" : " ") + l;
  return out;
}

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number()) return parse_rational(j.dump());
  throw FormatError("expected a number");
}

json word_to_json(const Basis& b, const Word& w) { return {{"basis", basis_to_json(b)}, {"word", b.format(w)}}; }

Word word_from_json(const json& j, const Basis& b) {
  if (j.is_string()) return b.parse_word(j.get<std::string>());
  if (j.is_object() && j.contains("word")) {
    if (j.contains("basis") && !(basis_from_json(j["basis"]) == b)) throw BasisMismatch("word uses another basis");
    return b.parse_word(j["word"].get<std::string>());
  }
  throw FormatError("expected a word");
}

namespace {

std::vector<Word> image_list(const json& j, const Basis& source, const Basis& target) {
  std::vector<Word> out;
  for (const auto& l : source.letters()) {
    if (!j.contains(l)) throw FormatError("no image for " + l);
    out.push_back(target.parse_word(j[l].get<std::string>()));
  }
  if (j.size() != source.letters().size()) throw FormatError("images for letters outside the basis");
  return out;
}

json image_object(const std::vector<Word>& images, const Basis& source, const Basis& target) {
  json out = json::object();
  for (std::size_t i = 0; i < images.size(); ++i) out[source.letters()[i]] = target.format(images[i]);
  return out;
}

const json& field(const json& j, const char* name) {
  if (!j.contains(name)) throw FormatError(std::string("missing field '") + name + "'");
  return j[name];
}

}  // namespace

json automorphism_to_json(const Automorphism& a) {
  json j{{"source", basis_to_json(a.source())},
         {"target", basis_to_json(a.target())},
         {"images", image_object(a.images(), a.source(), a.target())}};
  if (a.inverse_images()) j["inverse_images"] = image_object(*a.inverse_images(), a.target(), a.source());
  return j;
}

Automorphism automorphism_from_json(const json& j) {
  const Basis source = basis_from_json(field(j, "source"));
  const Basis target = j.contains("target") ? basis_from_json(j["target"]) : source;
  auto images = image_list(field(j, "images"), source, target);
  std::optional<std::vector<Word>> inv;
  if (j.contains("inverse_images")) inv = image_list(j["inverse_images"], target, source);
  return Automorphism(source, target, std::move(images), std::move(inv));
}

json ray_to_json(const Basis& b, const Ray& r) {
  return {{"prefix", b.format(r.prefix())}, {"period", b.format(r.period())}};
}

Ray ray_from_json(const json& j, const Basis& b) {
  return Ray(b.parse_word(field(j, "prefix").get<std::string>()), b.parse_word(field(j, "period").get<std::string>()));
}

std::vector<Ray> rays_from_json(const json& j, const Basis& b) {
  const json& list = j.is_object() ? field(j, "rays") : j;
  if (!list.is_array()) throw FormatError("expected a list of rays");
  std::vector<Ray> out;
  for (const auto& r : list) out.push_back(ray_from_json(r, b));
  return out;
}

json leaf_to_json(const Basis& b, const Leaf& l) {
  return {{"left", ray_to_json(b, l.left())}, {"right", ray_to_json(b, l.right())}};
}

Leaf leaf_from_json(const json& j, const Basis& b) {
  return Leaf(ray_from_json(field(j, "left"), b), ray_from_json(field(j, "right"), b));
}

std::vector<Leaf> leaves_from_json(const json& j, const Basis& b) {
  const json& list = j.is_object() ? field(j, "leaves") : j;
  if (!list.is_array()) throw FormatError("expected a list of leaves");
  std::vector<Leaf> out;
  for (const auto& l : list) out.push_back(leaf_from_json(l, b));
  return out;
}

json length_to_json(const Length& l) {
  if (l.is_exact) return {{"exact", format_rational(l.exact)}, {"value", format_real(l.value)}};
  return {{"value", format_real(l.value)}, {"error", format_real(l.error)}, {"converged", l.converged}};
}

json language_to_json(const LaminaryLanguage& L) {
  json words = json::array();
  for (const auto& w : L.words()) words.push_back(L.basis().format(w));
  json prov = L.provenance().is_null() ? json::object() : L.provenance();
  prov["flags"] = L.flags();
  return {{"basis", basis_to_json(L.basis())}, {"depth", L.depth()}, {"provenance", prov}, {"words", words}};
}

LaminaryLanguage language_from_json(const json& j) {
  const Basis b = basis_from_json(field(j, "basis"));
  WordSet words;
  for (const auto& w : field(j, "words")) words.insert(b.parse_word(w.get<std::string>()));
  json prov = j.contains("provenance") ? j["provenance"] : json::object();
  std::vector<std::string> flags;
  if (prov.contains("flags")) {
    flags = prov["flags"].get<std::vector<std::string>>();
    prov.erase("flags");
  }
  LaminaryLanguage L(b, field(j, "depth").get<std::size_t>(), std::move(words), std::move(prov));
  for (const auto& f : flags) L.flag(f);
  return L;
}

json diff_to_json(const Basis& b, const LanguageDiff& d) {
  json l = json::array(), r = json::array();
  for (const auto& w : d.left_minus_right) l.push_back(b.format(w));
  for (const auto& w : d.right_minus_left) r.push_back(b.format(w));
  return {{"equal", d.equal}, {"left_minus_right", l}, {"right_minus_left", r}};
}

json omega_to_json(const Basis& b, const OmegaSet& omega) {
  json el = json::array();
  for (const auto& w : omega.elements) el.push_back(b.format(w.word()));
  return {{"epsilon", omega.epsilon.to_string()},
          {"length_cap", omega.length_cap},
          {"elements", el},
          {"count", omega.elements.size()},
          {"flags", omega.flags}};
}

json l1_to_json(const Basis&, const L1Verdict& v) {
  json j{{"member", v.member}, {"exact", v.exact}};
  if (v.sup_displacement) j["sup_displacement"] = length_to_json(*v.sup_displacement);
  if (v.divergence) {
    j["divergence"] = {{"k", v.divergence->k},
                       {"l", v.divergence->l},
                       {"distance", length_to_json(v.divergence->distance)},
                       {"period_length", length_to_json(v.divergence->period_length)}};
  }
  return j;
}

Automorphism automorphism_ref(const json& j, const fs::path& dir) {
  if (j.is_string()) return automorphism_from_json(read_json(dir / j.get<std::string>()));
  return automorphism_from_json(j);
}

namespace {

ModelPtr graph_from_json(const json& j) {
  std::vector<std::string> vertices = field(j, "vertices").get<std::vector<std::string>>();
  auto vertex = [&](const json& v) {
    const std::string id = v.is_string() ? v.get<std::string>() : std::to_string(v.get<int>());
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (vertices[i] == id) return static_cast<int>(i);
    }
    throw FormatError("unknown vertex " + id);
  };
  std::vector<MarkedMetricGraph::Edge> edges;
  for (const auto& e : field(j, "edges")) {
    edges.push_back({field(e, "id").get<std::string>(), vertex(field(e, "from")), vertex(field(e, "to")),
                     rational_from_json(field(e, "length"))});
  }
  const json& marking = field(j, "marking");
  Basis basis;
  if (j.contains("basis")) {
    basis = basis_from_json(j["basis"]);
  } else {
    std::vector<std::string> letters;
    for (const auto& [k, v] : marking.items()) letters.push_back(k);
    basis = basis_from_json(letters);
  }
  std::vector<std::vector<Letter>> paths;
  for (const auto& l : basis.letters()) {
    std::vector<Letter> path;
    for (const auto& step : field(marking, l.c_str())) {
      std::string id = step.get<std::string>();
      bool back = false;
      if (!id.empty() && id.back() == '\'') {
        back = true;
        id.pop_back();
      }
      int idx = -1;
      for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].id == id) idx = static_cast<int>(i);
      }
      if (idx < 0) throw FormatError("unknown edge " + id);
      path.push_back(back ? -(idx + 1) : idx + 1);
    }
    paths.push_back(std::move(path));
  }
  return std::make_shared<MarkedMetricGraph>(basis, vertices, edges, paths, vertex(field(j, "base")),
                                             j.value("name", "graph"));
}

IntMatrix matrix_from_json(const json& j) { return j.get<IntMatrix>(); }

}  // namespace

ModelPtr model_from_json(const json& j, const fs::path& dir, const LimitOptions& limit) {
  if (!j.is_object()) throw FormatError("a model is a JSON object");
  if (j.value("type", "") == "pullback") {
    const json& base = field(j, "base");
    ModelPtr b = base.is_string() ? load_model(dir / base.get<std::string>(), limit) : model_from_json(base, dir, limit);
    return pullback(std::move(b), automorphism_ref(field(j, "automorphism"), dir));
  }
  if (j.contains("edges")) return graph_from_json(j);
  if (j.contains("side1")) {
    const Basis b = basis_from_json(field(j, "basis"));
    auto compact = [](std::string s) {
      std::erase(s, ' ');
      return s;
    };
    return std::make_shared<SplittingTree>(b, compact(field(j, "side1").get<std::string>()),
                                           compact(field(j, "side2").get<std::string>()),
                                           compact(field(j, "shared").get<std::string>()),
                                           rational_from_json(field(j, "edge_length")),
                                           field(j, "basepoint_side").get<int>(), j.value("name", "splitting"));
  }
  if (j.contains("automorphism")) {
    Automorphism alpha = automorphism_ref(j["automorphism"], dir);
    std::optional<IntMatrix> m;
    if (j.contains("matrix")) m = matrix_from_json(j["matrix"]);
    LimitOptions opts = limit;
    if (j.contains("scale")) opts.scale = j["scale"].get<double>();
    return std::make_shared<LimitTree>(TrainTrackSpec::make(std::move(alpha), m, j.value("certified", false)), opts,
                                       j.value("name", "limit"));
  }
  throw FormatError("unrecognized model description");
}

ModelPtr load_model(const fs::path& path, const LimitOptions& limit) {
  return model_from_json(read_json(path), path.parent_path(), limit);
}

}  // namespace io

// ---------------------------------------------------------------- image cache

ImageCache::ImageCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string ImageCache::key(const Automorphism& alpha) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : alpha.canonical_text()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::filesystem::path ImageCache::entry(const Automorphism& alpha, int k) const {
  return dir_ / (key(alpha) + "_k" + std::to_string(k) + ".json");
}

std::vector<Word> ImageCache::images(const Automorphism& alpha, int k) {
  const Basis& b = alpha.source();
  const auto path = entry(alpha, k);
  if (std::filesystem::exists(path)) {
    try {
      const auto j = io::read_json(path);
      if (j.at("automorphism").get<std::string>() != alpha.canonical_text() || j.at("k").get<int>() != k) {
        throw FormatError("entry belongs to another automorphism");
      }
      std::vector<Word> out;
      for (const auto& w : j.at("images")) out.push_back(b.parse_word(w.get<std::string>()));
      if (out.size() != static_cast<std::size_t>(b.rank())) throw FormatError("wrong number of images");
      ++hits_;
      return out;
    } catch (const std::exception& e) {
      warnings_.push_back("corrupt cache entry " + path.string() + " rebuilt: " + e.what());
    }
  }
  ++misses_;
  const Automorphism step = k < 0 ? alpha.inverse() : alpha;
  std::vector<Word> out;
  for (int g = 0; g < b.rank(); ++g) out.push_back(Word::letter(g + 1));
  for (int i = 0; i < std::abs(k); ++i) {
    for (auto& w : out) w = step.apply(w);
  }
  nlohmann::json j{{"automorphism", alpha.canonical_text()}, {"k", k}, {"images", nlohmann::json::array()}};
  for (const auto& w : out) j["images"].push_back(b.format(w));
  // write then rename so readers never see a partial entry
  std::filesystem::create_directories(dir_);
  const auto tmp = path.string() + ".tmp";
  io::write_file(tmp, io::dump(j));
  std::filesystem::rename(tmp, path);
  return out;
}

}  // namespace dlam
