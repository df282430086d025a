#pragma once

// JSON file formats, model loading and the α^k image cache.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "dlam/automorphism.hpp"
#include "dlam/lamination.hpp"
#include "dlam/limit_tree.hpp"
#include "dlam/qmap.hpp"
#include "dlam/tree_model.hpp"

namespace dlam {

inline constexpr const char* kVersion = "dlam 0.1.0";

namespace io {

using nlohmann::json;
namespace fs = std::filesystem;

json read_json(const fs::path& path);
/// Two-space indent, trailing newline. Object keys come out sorted.
std::string dump(const json& j);
void write_file(const fs::path& path, const std::string& text);

Basis basis_from_json(const json& j);
json basis_to_json(const Basis& b);

/// Rationals as "3/2", decimals or JSON integers.
Rational rational_from_json(const json& j);

json word_to_json(const Basis& b, const Word& w);
/// Either a plain string or {"basis", "word"}.
Word word_from_json(const json& j, const Basis& b);

json automorphism_to_json(const Automorphism& a);
Automorphism automorphism_from_json(const json& j);

json ray_to_json(const Basis& b, const Ray& r);
Ray ray_from_json(const json& j, const Basis& b);
/// An array of rays or {"rays": [...]}.
std::vector<Ray> rays_from_json(const json& j, const Basis& b);
json leaf_to_json(const Basis& b, const Leaf& l);
/// {"left": ray, "right": ray}.
Leaf leaf_from_json(const json& j, const Basis& b);
std::vector<Leaf> leaves_from_json(const json& j, const Basis& b);

json length_to_json(const Length& l);

json language_to_json(const LaminaryLanguage& L);
LaminaryLanguage language_from_json(const json& j);
json diff_to_json(const Basis& b, const LanguageDiff& d);

json omega_to_json(const Basis& b, const OmegaSet& omega);
json l1_to_json(const Basis& b, const L1Verdict& v);

/// Models by key: "edges" is a marked graph, "side1" a splitting, "automorphism" a
/// limit tree, "type": "pullback" a base model pulled back by an automorphism.
/// Relative file references resolve against `dir`.
ModelPtr model_from_json(const json& j, const fs::path& dir, const LimitOptions& limit = {});
ModelPtr load_model(const fs::path& path, const LimitOptions& limit = {});
/// Automorphism given inline or as a file name.
Automorphism automorphism_ref(const json& j, const fs::path& dir);

}  // namespace io

/// α^k generator images on disk, content-addressed by the automorphism text.
class ImageCache {
 public:
  explicit ImageCache(std::filesystem::path dir);

  /// Images of the source generators under α^k; k < 0 uses the inverse.
  std::vector<Word> images(const Automorphism& alpha, int k);

  static std::string key(const Automorphism& alpha);
  std::filesystem::path entry(const Automorphism& alpha, int k) const;

  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  std::filesystem::path dir_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
  std::vector<std::string> warnings_;
};

}  // namespace dlam
