#include "dlam/cli.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dlam/io.hpp"

namespace dlam::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kMaybeFlags{"unstabilized", "unconverged", "undercount"};

fs::path resolve(const fs::path& dir, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || dir.empty() ? path : dir / path;
}

struct Context {
  Context(const JobConfig& c, fs::path d) : cfg(c), dir(std::move(d)) {}

  const JobConfig& cfg;
  fs::path dir;
  json params = json::object();
  std::set<std::string> flags;
  std::vector<std::string> warnings;
  std::ostringstream table;
  ModelPtr model;

  LimitOptions limit() const { return {cfg.kmax, cfg.tol, 1.0}; }

  const TreeModel& load() {
    if (cfg.model.empty()) throw std::invalid_argument("--model is required");
    model = io::load_model(resolve(dir, cfg.model), limit());
    params["model"] = model->describe();
    return *model;
  }

  Basis basis() {
    if (model) return model->basis();
    if (!cfg.basis.empty()) return Basis::parse(cfg.basis);
    if (!cfg.model.empty()) return load().basis();
    return Basis::parse("abc");
  }

  Ray ray(const Basis& b, const std::string& text) {
    const auto bar = text.find('|');
    if (bar == std::string::npos) throw FormatError("a ray is written prefix|period, got '" + text + "'");
    return Ray(b.parse_word(text.substr(0, bar)), b.parse_word(text.substr(bar + 1)));
  }

  std::vector<Ray> rays(const Basis& b) {
    std::vector<Ray> out;
    for (const auto& r : cfg.rays) out.push_back(ray(b, r));
    if (!cfg.rays_file.empty()) {
      auto more = io::rays_from_json(io::read_json(resolve(dir, cfg.rays_file)), b);
      out.insert(out.end(), more.begin(), more.end());
    }
    return out;
  }

  std::vector<Threshold> schedule(const TreeModel& T) {
    if (cfg.eps.empty()) return default_schedule(T, cfg.cap);
    std::vector<Threshold> out;
    std::stringstream ss(cfg.eps);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(Threshold::parse(item));
    return out;
  }
};

std::string join(const std::vector<std::string>& xs, const char* sep = ", ") {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : sep) + x;
  return out;
}

void language_table(std::ostream& os, const LaminaryLanguage& L) {
  os << "depth " << L.depth() << ", " << L.words().size() << " words\n";
  for (const auto& w : L.words()) os << "  " << L.basis().format(w) << "\n";
}

json cmd_length(Context& c) {
  const TreeModel& T = c.load();
  const Basis& b = T.basis();
  Word w = b.parse_word(c.cfg.word);
  c.params["word"] = c.cfg.word;
  if (c.cfg.power != 0) {
    Automorphism alpha = [&] {
      if (!c.cfg.automorphism.empty()) return io::automorphism_from_json(io::read_json(resolve(c.dir, c.cfg.automorphism)));
      if (auto lt = dynamic_cast<const LimitTree*>(&T)) return lt->spec().alpha;
      throw std::invalid_argument("--power needs --aut or a limit tree");
    }();
    ImageCache cache(c.cfg.cache_dir);
    const auto images = cache.images(alpha, c.cfg.power);
    std::vector<Letter> out;
    for (Letter x : w) {
      const Word img = x > 0 ? images[static_cast<std::size_t>(x - 1)] : images[static_cast<std::size_t>(-x - 1)].inverse();
      out.insert(out.end(), img.begin(), img.end());
    }
    w = Word(std::span<const Letter>(out));
    c.params["power"] = c.cfg.power;
    c.warnings.insert(c.warnings.end(), cache.warnings().begin(), cache.warnings().end());
  }
  const auto dec = cyclic_decompose(w);
  const Length tl = T.translation_length(CyclicWord(w));
  const Length d = T.displacement(w);
  if (!tl.converged || !d.converged) c.flags.insert("unconverged");
  c.table << "word                " << b.format(w) << "\n"
          << "translation length  " << tl.to_string() << "\n"
          << "displacement        " << d.to_string() << "\n"
          << "conjugator          " << b.format(dec.conjugator) << "\n"
          << "core                " << b.format(dec.core) << "\n";
  return {{"word", b.format(w)},
          {"translation_length", io::length_to_json(tl)},
          {"displacement", io::length_to_json(d)},
          {"conjugator", b.format(dec.conjugator)},
          {"core", b.format(dec.core)}};
}

json cmd_omega(Context& c) {
  const TreeModel& T = c.load();
  if (c.cfg.eps.empty()) throw std::invalid_argument("--eps is required");
  const Threshold eps = Threshold::parse(c.cfg.eps);
  c.params["eps"] = eps.to_string();
  c.params["cap"] = c.cfg.cap;
  const OmegaSet omega = omega_enumerate(T, eps, c.cfg.cap, c.cfg.jobs);
  c.flags.insert(omega.flags.begin(), omega.flags.end());
  json out = io::omega_to_json(T.basis(), omega);
  out.erase("flags");
  const auto* g = dynamic_cast<const MarkedMetricGraph*>(&T);
  if (omega.elements.empty() && g && g->zero_length_edges().empty()) out["note"] = "free simplicial";
  c.table << "epsilon " << eps.to_string() << ", cap " << c.cfg.cap << ", " << omega.elements.size() << " elements\n";
  for (const auto& w : omega.elements) c.table << "  " << T.basis().format(w.word()) << "\n";
  if (out.contains("note")) c.table << "note: " << out["note"].get<std::string>() << "\n";
  return out;
}

json cmd_lang(Context& c) {
  const TreeModel& T = c.load();
  const auto sched = c.schedule(T);
  std::vector<std::string> s;
  for (const auto& t : sched) s.push_back(t.to_string());
  c.params["schedule"] = s;
  c.params["depth"] = c.cfg.depth;
  c.params["cap"] = c.cfg.cap;
  const auto L = l_omega_language(T, c.cfg.depth, sched, c.cfg.cap, c.cfg.jobs);
  c.flags.insert(L.flags().begin(), L.flags().end());
  if (L.flags().count("undercount")) c.warnings.push_back("cap below 2·depth: the language may be undercounted");
  language_table(c.table, L);
  return io::language_to_json(L);
}

json cmd_recurrent(Context& c) {
  const Basis b = c.basis();
  std::vector<Ray> rays = c.rays(b);
  if (c.cfg.prefix_cap || c.cfg.period_cap) {
    const TreeModel& T = c.model ? *c.model : c.load();
    const std::size_t pc = c.cfg.prefix_cap.value_or(0), qc = c.cfg.period_cap.value_or(1);
    for (const auto& r : enumerate_rays(b.rank(), pc, qc)) {
      if (l1_test(r, T).member) rays.push_back(r);
    }
    c.params["prefix_cap"] = pc;
    c.params["period_cap"] = qc;
  }
  std::sort(rays.begin(), rays.end());
  rays.erase(std::unique(rays.begin(), rays.end()), rays.end());
  c.params["rays"] = rays.size();
  c.params["depth"] = c.cfg.depth;
  const auto L = l_infinity_language(b, rays, c.cfg.depth);
  language_table(c.table, L);
  return io::language_to_json(L);
}

// a language file, or a report whose result is a language
LaminaryLanguage read_language(const fs::path& path) {
  json j = io::read_json(path);
  if (j.contains("result") && j["result"].contains("words")) j = j["result"];
  return io::language_from_json(j);
}

json cmd_compare(Context& c) {
  if (c.cfg.files.size() != 2) throw std::invalid_argument("compare takes two language files");
  const auto A = read_language(resolve(c.dir, c.cfg.files[0]));
  const auto B = read_language(resolve(c.dir, c.cfg.files[1]));
  if (!(A.basis() == B.basis())) throw BasisMismatch("languages use different bases");
  const auto d = compare(A, B);
  c.table << (d.equal ? "equal" : "different") << "\n";
  for (const auto& w : d.left_minus_right) c.table << "  only left   " << A.basis().format(w) << "\n";
  for (const auto& w : d.right_minus_left) c.table << "  only right  " << A.basis().format(w) << "\n";
  return io::diff_to_json(A.basis(), d);
}

json cmd_l1(Context& c) {
  const TreeModel& T = c.load();
  const Basis& b = T.basis();
  const auto rays = c.rays(b);
  if (rays.empty()) throw std::invalid_argument("no rays given");
  json out = json::array();
  for (const auto& r : rays) {
    const auto v = l1_test(r, T);
    json j = io::l1_to_json(b, v);
    j["ray"] = io::ray_to_json(b, r);
    j["verified"] = verify_l1(v, r, T);
    out.push_back(j);
    c.table << (v.member ? "member      " : "non-member  ") << b.format(r.prefix()) << " | " << b.format(r.period());
    if (v.sup_displacement) c.table << "   sup d(P, X_k P) <= " << v.sup_displacement->to_string();
    if (v.divergence) c.table << "   d = " << v.divergence->distance.to_string() << " at k=" << v.divergence->k << " l=" << v.divergence->l;
    c.table << "\n";
  }
  return {{"verdicts", out}};
}

json cmd_qpair(Context& c) {
  const TreeModel& T = c.load();
  const Basis& b = T.basis();
  std::vector<Leaf> leaves;
  for (const auto& l : c.cfg.leaves) {
    const auto comma = l.find(',');
    if (comma == std::string::npos) throw FormatError("a leaf is written prefix|period,prefix|period");
    leaves.emplace_back(c.ray(b, l.substr(0, comma)), c.ray(b, l.substr(comma + 1)));
  }
  if (!c.cfg.leaves_file.empty()) {
    auto more = io::leaves_from_json(io::read_json(resolve(c.dir, c.cfg.leaves_file)), b);
    leaves.insert(leaves.end(), more.begin(), more.end());
  }
  if (leaves.empty()) throw std::invalid_argument("no leaves given");
  std::optional<LaminaryLanguage> lang;
  if (!c.cfg.language.empty()) lang = read_language(resolve(c.dir, c.cfg.language));
  json out = json::array();
  for (const auto& l : leaves) {
    const auto v = q_pair_test(l, T, lang ? &*lang : nullptr);
    json j = io::leaf_to_json(b, l);
    j["pass"] = v.pass;
    j["exact"] = v.exact;
    if (T.exact() && v.pass) {
      const QPoint q = q_point(l.left(), T);
      j["q_point"] = {{"translate", b.format(q.translate)}, {"elliptic", b.format(q.elliptic)}};
    }
    out.push_back(j);
    c.table << (v.pass ? "pass  " : "fail  ") << b.format(l.left().prefix()) << " | " << b.format(l.left().period())
            << "  ,  " << b.format(l.right().prefix()) << " | " << b.format(l.right().period())
            << (v.exact ? "" : "  (numeric)") << "\n";
  }
  return {{"leaves", out}};
}

json cmd_bcc(Context& c) {
  if (c.cfg.automorphism.empty()) throw std::invalid_argument("--aut is required");
  const auto alpha = io::automorphism_from_json(io::read_json(resolve(c.dir, c.cfg.automorphism)));
  c.params["automorphism"] = io::automorphism_to_json(alpha);
  c.params["depth"] = c.cfg.depth;
  const auto bound = cancellation_bound(alpha, c.cfg.depth, c.cfg.jobs);
  const Basis& b = alpha.source();
  json out{{"value", bound.value},
           {"kind", bound.kind == CancellationBound::Kind::UpperBound ? "upper_bound" : "exact_up_to_depth"},
           {"depth_checked", bound.depth_checked},
           {"cheap_value", bound.cheap_value},
           {"verified", verify_cancellation_bound(alpha, bound)}};
  if (bound.witness) out["witness"] = {b.format(bound.witness->first), b.format(bound.witness->second)};
  c.table << "cancellation bound  " << bound.value << " (" << out["kind"].get<std::string>() << ", depth "
          << bound.depth_checked << ")\n"
          << "volume bound        " << bound.cheap_value << "\n";
  return out;
}

json dispatch(Context& c) {
  const std::string& cmd = c.cfg.command;
  if (cmd == "length") return cmd_length(c);
  if (cmd == "omega") return cmd_omega(c);
  if (cmd == "lang") return cmd_lang(c);
  if (cmd == "recurrent") return cmd_recurrent(c);
  if (cmd == "compare") return cmd_compare(c);
  if (cmd == "l1") return cmd_l1(c);
  if (cmd == "qpair") return cmd_qpair(c);
  if (cmd == "bcc") return cmd_bcc(c);
  throw std::invalid_argument("unknown command '" + cmd + "'");
}

std::size_t to_size(const json& v) { return v.is_string() ? std::stoul(v.get<std::string>()) : v.get<std::size_t>(); }
int to_int(const json& v) { return v.is_string() ? std::stoi(v.get<std::string>()) : v.get<int>(); }
double to_real(const json& v) { return v.is_string() ? std::stod(v.get<std::string>()) : v.get<double>(); }
std::string to_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }
std::vector<std::string> to_list(const json& v) {
  if (v.is_array()) {
    std::vector<std::string> out;
    for (const auto& x : v) out.push_back(to_text(x));
    return out;
  }
  return {to_text(v)};
}

}  // namespace

void apply_config(JobConfig& cfg, const json& j) {
  if (!j.is_object()) throw FormatError("a config is a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "command") cfg.command = to_text(v);
    else if (key == "model") cfg.model = to_text(v);
    else if (key == "aut") cfg.automorphism = to_text(v);
    else if (key == "basis") cfg.basis = to_text(v);
    else if (key == "word") cfg.word = to_text(v);
    else if (key == "power") cfg.power = to_int(v);
    else if (key == "eps") {
      if (v.is_array()) cfg.eps = join(to_list(v), ",");
      else cfg.eps = to_text(v);
    }
    else if (key == "depth") cfg.depth = to_size(v);
    else if (key == "cap") cfg.cap = to_size(v);
    else if (key == "kmax") cfg.kmax = to_int(v);
    else if (key == "tol") cfg.tol = to_real(v);
    else if (key == "ray") cfg.rays = to_list(v);
    else if (key == "rays") cfg.rays_file = to_text(v);
    else if (key == "prefix-cap") cfg.prefix_cap = to_size(v);
    else if (key == "period-cap") cfg.period_cap = to_size(v);
    else if (key == "leaf") cfg.leaves = to_list(v);
    else if (key == "leaves") cfg.leaves_file = to_text(v);
    else if (key == "lang") cfg.language = to_text(v);
    else if (key == "files") cfg.files = to_list(v);
    else if (key == "cache-dir") cfg.cache_dir = to_text(v);
    else if (key == "jobs") cfg.jobs = to_int(v);
    else if (key == "out" || key == "config" || key == "name") continue;
    else throw FormatError("unknown config key '" + key + "'");
  }
}

Outcome run(const JobConfig& cfg, const fs::path& dir) {
  if (cfg.jobs < 1) throw std::invalid_argument("--jobs must be positive");
  if (cfg.cap == 0 || cfg.depth == 0) throw std::invalid_argument("caps and depth must be positive");
  Context c{cfg, dir};
  json result = dispatch(c);
  Outcome out;
  std::vector<std::string> flags(c.flags.begin(), c.flags.end());
  if (result.is_object() && result.contains("provenance")) {
    // language flags already live in the language provenance
    for (const auto& f : result["provenance"].value("flags", std::vector<std::string>{})) {
      if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.push_back(f);
    }
    std::sort(flags.begin(), flags.end());
  }
  out.report = {{"command", cfg.command},
                {"result", result},
                {"provenance", {{"tool", kVersion}, {"parameters", c.params}, {"flags", flags}}}};
  out.table = c.table.str();
  out.warnings = c.warnings;
  for (const auto& f : flags) {
    if (kMaybeFlags.count(f)) out.exit_code = 2;
  }
  if (!flags.empty()) out.table += "flags: " + join(flags) + "\n";
  return out;
}

namespace {

Outcome run_report(const fs::path& config, const JobConfig& overrides, const json& explicit_flags) {
  const json j = io::read_json(config);
  if (!j.contains("jobs") || !j["jobs"].is_array()) throw FormatError("a report config has a \"jobs\" list");
  Outcome out;
  json results = json::array();
  for (const auto& job : j["jobs"]) {
    JobConfig cfg = overrides;
    if (j.contains("defaults")) apply_config(cfg, j["defaults"]);
    apply_config(cfg, job);
    apply_config(cfg, explicit_flags);
    if (cfg.command == "report") throw FormatError("reports do not nest");
    Outcome o = run(cfg, config.parent_path());
    json entry = o.report;
    entry["exit_code"] = o.exit_code;
    if (job.contains("name")) entry["name"] = job["name"];
    results.push_back(entry);
    out.exit_code = std::max(out.exit_code, o.exit_code);
    out.table += "== " + cfg.command + (job.contains("name") ? " " + to_text(job["name"]) : "") + "\n" + o.table;
    out.warnings.insert(out.warnings.end(), o.warnings.begin(), o.warnings.end());
  }
  out.report = {{"command", "report"}, {"results", results}, {"provenance", {{"tool", kVersion}, {"config", j}}}};
  return out;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dual laminations of free group actions on R-trees", "dlam"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  JobConfig cfg;
  std::string out_path, config_path;
  std::string cache_dir = cfg.cache_dir.string();
  std::size_t prefix_cap = 0, period_cap = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "write the JSON report here ('-' for stdout)");
    sub->add_option("--cache-dir", cache_dir, "cache for automorphism images");
    sub->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--config", config_path, "JSON file with default settings");
    sub->add_option("--kmax", cfg.kmax, "limit tree iteration depth");
    sub->add_option("--tol", cfg.tol, "limit tree tolerance");
  };
  auto model = [&](CLI::App* sub) { sub->add_option("--model", cfg.model, "model file"); };
  auto ray_opts = [&](CLI::App* sub) {
    sub->add_option("--ray", cfg.rays, "ray as prefix|period, repeatable");
    sub->add_option("--rays", cfg.rays_file, "JSON file of rays");
  };

  auto* length = app.add_subcommand("length", "translation length and displacement of a word");
  model(length);
  length->add_option("word", cfg.word, "word, e.g. \"a b' c\"")->required();
  length->add_option("--power", cfg.power, "apply the k-th power of the automorphism first");
  length->add_option("--aut", cfg.automorphism, "automorphism file for --power");
  auto* omega = app.add_subcommand("omega", "cyclic words shorter than epsilon");
  model(omega);
  omega->add_option("--eps", cfg.eps, "threshold");
  omega->add_option("--cap", cfg.cap, "word length cap");
  auto* lang = app.add_subcommand("lang", "dual lamination language at depth");
  model(lang);
  lang->add_option("--depth", cfg.depth, "word depth");
  lang->add_option("--eps", cfg.eps, "decreasing schedule, comma separated");
  lang->add_option("--cap", cfg.cap, "word length cap");
  auto* rec = app.add_subcommand("recurrent", "recurrent language of rays");
  model(rec);
  rec->add_option("--basis", cfg.basis, "basis when no model is given");
  rec->add_option("--depth", cfg.depth, "word depth");
  rec->add_option("--prefix-cap", prefix_cap, "enumerate L1 rays of the model up to this prefix length");
  rec->add_option("--period-cap", period_cap, "and this period length");
  ray_opts(rec);
  auto* cmp = app.add_subcommand("compare", "compare two language files");
  cmp->add_option("files", cfg.files, "left and right language")->expected(2)->required();
  auto* l1 = app.add_subcommand("l1", "L1 membership of rays");
  model(l1);
  ray_opts(l1);
  auto* qp = app.add_subcommand("qpair", "Q-relation on leaves");
  model(qp);
  qp->add_option("--leaf", cfg.leaves, "leaf as prefix|period,prefix|period, repeatable");
  qp->add_option("--leaves", cfg.leaves_file, "JSON file of leaves");
  qp->add_option("--lang", cfg.language, "language file, needed for limit trees");
  auto* bcc = app.add_subcommand("bcc", "bounded cancellation constant");
  bcc->add_option("--aut", cfg.automorphism, "automorphism file")->required();
  bcc->add_option("--depth", cfg.depth, "search depth");
  auto* report = app.add_subcommand("report", "run the jobs of a config file");
  std::string report_config;
  report->add_option("file", report_config, "report config")->required();
  for (auto* sub : {length, omega, lang, rec, cmp, l1, qp, bcc, report}) common(sub);

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 1;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    cfg.cache_dir = cache_dir;
    if (sub == rec && rec->count("--prefix-cap")) cfg.prefix_cap = prefix_cap;
    if (sub == rec && rec->count("--period-cap")) cfg.period_cap = period_cap;
    // flags given on the command line win over config files
    json explicit_flags = json::object();
    for (const auto* opt : sub->get_options()) {
      if (opt->count() == 0 || opt->get_lnames().empty()) continue;
      const std::string name = opt->get_lnames().front();
      if (name == "config" || name == "out" || name == "help") continue;
      const auto& res = opt->results();
      const bool many = name == "ray" || name == "leaf";
      explicit_flags[name] = many ? json(res) : json(res.back());
    }
    fs::path dir;
    if (!config_path.empty()) {
      JobConfig base;
      base.command = cfg.command;
      apply_config(base, io::read_json(config_path));
      apply_config(base, explicit_flags);
      base.word = cfg.word;
      base.files = cfg.files.empty() ? base.files : cfg.files;
      cfg = base;
      dir = fs::path(config_path).parent_path();
    }
    Outcome o = cfg.command == "report" ? run_report(report_config, cfg, explicit_flags) : run(cfg, dir);
    for (const auto& w : o.warnings) err << "warning: " << w << "\n";
    const std::string text = io::dump(o.report);
    if (out_path == "-") {
      out << text;
    } else {
      out << o.table;
      if (!out_path.empty()) io::write_file(out_path, text);
    }
    return o.exit_code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dlam::cli
