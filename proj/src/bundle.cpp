#include "mope/bundle.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mope/error.hpp"

namespace mope::bundle {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(Variant v) { return v == Variant::kOnline ? "online" : "offline"; }

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

clustering::ClusterModel Manifest::cluster_model() const {
  clustering::ClusterModel cm;
  cm.k = k;
  cm.centers = clustering::Matrix::from_rows(centers);
  cm.standardizer = standardizer;
  cm.sizes = cluster_sizes;
  return cm;
}

std::string Manifest::canonical_text() const {
  json j;
  j["schema_version"] = schema_version;
  j["variant"] = to_string(variant);
  j["alphabet"] = alphabet;
  j["k"] = k;
  j["beta"] = beta;
  j["standardizer"] = {{"means", standardizer.means}, {"stds", standardizer.stds}};
  j["centers"] = centers;
  j["cluster_sizes"] = cluster_sizes;
  j["expert_files"] = expert_files;
  j["config"] = config;
  j["config_digest"] = config_digest;
  if (student_file) j["student"] = {{"file", *student_file}, {"kind", "distilled"}};
  if (variant == Variant::kOnline) {
    j["beam_width"] = beam_width;
    j["candidates"] = candidates;
    j["max_ops"] = max_ops;
  }
  if (selection) {
    j["selection"] = {{"ks", selection->ks},
                      {"scores", selection->scores},
                      {"chosen", selection->chosen},
                      {"threshold", selection->threshold},
                      {"threshold_met", selection->threshold_met}};
  }
  return j.dump(2) + "\n";
}

Manifest Manifest::parse(const std::string& text) {
  Manifest m;
  try {
    const json j = json::parse(text);
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != kSchemaVersion) {
      throw DataError("unsupported bundle schema_version " + std::to_string(m.schema_version));
    }
    const auto variant = j.at("variant").get<std::string>();
    if (variant == "offline") {
      m.variant = Variant::kOffline;
    } else if (variant == "online") {
      m.variant = Variant::kOnline;
    } else {
      throw DataError("unknown bundle variant '" + variant + "'");
    }
    m.alphabet = j.at("alphabet").get<std::string>();
    m.k = j.at("k").get<std::size_t>();
    m.beta = j.at("beta").get<double>();
    m.standardizer.means = j.at("standardizer").at("means").get<std::array<double, features::kDims>>();
    m.standardizer.stds = j.at("standardizer").at("stds").get<std::array<double, features::kDims>>();
    m.centers = j.at("centers").get<std::vector<std::vector<double>>>();
    m.cluster_sizes = j.at("cluster_sizes").get<std::vector<std::size_t>>();
    m.expert_files = j.at("expert_files").get<std::vector<std::string>>();
    m.config = j.value("config", std::string());
    m.config_digest = j.value("config_digest", std::string());
    if (j.contains("student")) m.student_file = j.at("student").at("file").get<std::string>();
    m.beam_width = j.value("beam_width", std::size_t{150});
    m.candidates = j.value("candidates", std::size_t{1000});
    m.max_ops = j.value("max_ops", std::size_t{4});
    if (j.contains("selection")) {
      const auto& s = j.at("selection");
      clustering::KSelectionReport r;
      r.ks = s.at("ks").get<std::vector<std::size_t>>();
      r.scores = s.at("scores").get<std::vector<double>>();
      r.chosen = s.at("chosen").get<std::size_t>();
      r.threshold = s.at("threshold").get<double>();
      r.threshold_met = s.at("threshold_met").get<bool>();
      m.selection = std::move(r);
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
  if (m.centers.size() != m.k || m.cluster_sizes.size() != m.k) {
    throw DataError("manifest centers or cluster sizes do not match k");
  }
  for (const auto& c : m.centers) {
    if (c.size() != features::kDims) throw DataError("manifest center has the wrong dimension");
  }
  if (!m.expert_files.empty() && m.expert_files.size() != m.k) {
    throw DataError("manifest lists " + std::to_string(m.expert_files.size()) + " experts for k=" +
                    std::to_string(m.k));
  }
  return m;
}

Manifest read_manifest(const fs::path& dir) {
  std::ifstream in(dir / kManifestName);
  if (!in) throw DataError("cannot read " + (dir / kManifestName).string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return Manifest::parse(ss.str());
}

void write_manifest(const fs::path& dir, const Manifest& m) {
  fs::create_directories(dir);
  std::ofstream out(dir / kManifestName, std::ios::trunc);
  out << m.canonical_text();
  if (!out) throw DataError("cannot write " + (dir / kManifestName).string());
}

Manifest skeleton(const Alphabet& alphabet, const clustering::ClusterModel& clusters,
                  Variant variant, double beta) {
  Manifest m;
  m.variant = variant;
  m.alphabet = alphabet.symbols();
  m.k = clusters.k;
  m.beta = beta;
  m.standardizer = clusters.standardizer;
  for (std::size_t j = 0; j < clusters.k; ++j) {
    const auto r = clusters.centers.row(j);
    m.centers.emplace_back(r.begin(), r.end());
  }
  m.cluster_sizes = clusters.sizes;
  return m;
}

namespace {

std::string expert_file(std::size_t j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "expert_%02zu.bin", j);
  return buf;
}

gate::GateConfig gate_of(const Manifest& m, std::shared_ptr<const clustering::ClusterModel> cm) {
  gate::GateConfig g;
  g.beta = m.beta;
  g.clusters = std::move(cm);
  return g;
}

clustering::Selection fit_clusters(std::span<const std::string> passwords,
                                   clustering::SelectKOptions opt,
                                   std::optional<std::size_t> fixed_k) {
  if (fixed_k) opt.range = {*fixed_k, *fixed_k, 1};
  return clustering::cluster_passwords(passwords, opt);
}

std::string select_text(const clustering::SelectKOptions& s, std::optional<std::size_t> fixed_k,
                        double beta) {
  std::ostringstream os;
  os.precision(17);
  if (fixed_k) {
    os << "k=" << *fixed_k;
  } else {
    os << "k_range=" << s.range.min << ':' << s.range.max << ':' << s.range.step
       << ";tau=" << s.threshold;
  }
  os << ";seed=" << s.seed << ";max_iter=" << s.max_iter << ";beta=" << beta;
  return os.str();
}

}  // namespace

offline::OfflineMope OfflineBundle::mixture(offline::GatingMode mode) const {
  std::vector<std::shared_ptr<const CharModel>> ex(experts.begin(), experts.end());
  return offline::OfflineMope(alphabet, std::move(ex), gate_of(manifest, clusters), mode);
}

online::OnlineMope OnlineBundle::mixture() const {
  std::vector<std::shared_ptr<const online::EditModel>> ex(experts.begin(), experts.end());
  return online::OnlineMope(std::move(ex), gate_of(manifest, clusters), manifest.beam_width,
                            manifest.candidates);
}

OfflineBundle train_offline(std::span<const std::string> corpus, const Alphabet& alphabet,
                            const OfflineTrainConfig& cfg) {
  cfg.expert.validate();
  if (corpus.empty()) throw InvalidArgument("cannot train on an empty corpus");
  auto sel = fit_clusters(corpus, cfg.select, cfg.fixed_k);
  const auto& cm = sel.fit.model;

  OfflineBundle b;
  b.alphabet = alphabet;
  b.manifest = skeleton(alphabet, cm, Variant::kOffline, cfg.beta);
  b.manifest.selection = sel.report;
  b.manifest.config = select_text(cfg.select, cfg.fixed_k, cfg.beta) + ";" + cfg.expert.digest();
  b.manifest.config_digest = fnv1a_hex(b.manifest.config);

  const auto base = pretrain(corpus, alphabet, cfg.expert);
  std::vector<std::vector<std::string>> members(cm.k);
  for (std::size_t i = 0; i < corpus.size(); ++i) members[cm.labels[i]].push_back(corpus[i]);
  for (std::size_t j = 0; j < cm.k; ++j) {
    b.experts.push_back(std::make_shared<const NGramExpert>(
        finetune(base, members[j], cfg.expert, j, corpus.size())));
    b.manifest.expert_files.push_back(expert_file(j));
  }
  auto shared = std::make_shared<clustering::ClusterModel>(cm);
  shared->labels.clear();
  b.clusters = std::move(shared);
  return b;
}

OnlineBundle train_online(std::span<const corpus::PairRecord> pairs, const Alphabet& alphabet,
                          const OnlineTrainConfig& cfg) {
  cfg.expert.validate();
  if (pairs.empty()) throw InvalidArgument("cannot train on an empty pair list");
  std::vector<std::string> sources;
  sources.reserve(pairs.size());
  for (const auto& p : pairs) sources.push_back(p.src);
  auto sel = fit_clusters(sources, cfg.select, cfg.fixed_k);
  const auto& cm = sel.fit.model;

  OnlineBundle b;
  b.alphabet = alphabet;
  b.manifest = skeleton(alphabet, cm, Variant::kOnline, cfg.beta);
  b.manifest.selection = sel.report;
  b.manifest.beam_width = cfg.beam_width;
  b.manifest.candidates = cfg.candidates;
  b.manifest.max_ops = cfg.expert.max_ops;
  b.manifest.config = select_text(cfg.select, cfg.fixed_k, cfg.beta) + ";" + cfg.expert.digest();
  b.manifest.config_digest = fnv1a_hex(b.manifest.config);

  const auto base = online::pretrain_online(pairs, alphabet, cfg.expert);
  std::vector<std::vector<corpus::PairRecord>> members(cm.k);
  for (std::size_t i = 0; i < pairs.size(); ++i) members[cm.labels[i]].push_back(pairs[i]);
  for (std::size_t j = 0; j < cm.k; ++j) {
    b.experts.push_back(std::make_shared<const online::EditExpert>(
        online::finetune_online(base, members[j], cfg.expert, j, pairs.size())));
    b.manifest.expert_files.push_back(expert_file(j));
  }
  auto shared = std::make_shared<clustering::ClusterModel>(cm);
  shared->labels.clear();
  b.clusters = std::move(shared);
  return b;
}

void save(const OfflineBundle& b, const fs::path& dir) {
  fs::create_directories(dir);
  for (std::size_t j = 0; j < b.experts.size(); ++j) {
    b.experts[j]->save(dir / b.manifest.expert_files.at(j));
  }
  if (b.student) b.student->save(dir / kStudentName);
  auto m = b.manifest;
  if (b.student) m.student_file = kStudentName;
  write_manifest(dir, m);
}

void save(const OnlineBundle& b, const fs::path& dir) {
  fs::create_directories(dir);
  for (std::size_t j = 0; j < b.experts.size(); ++j) {
    b.experts[j]->save(dir / b.manifest.expert_files.at(j));
  }
  write_manifest(dir, b.manifest);
}

namespace {

template <class B>
void load_common(B& b, const fs::path& dir, Variant want) {
  b.manifest = read_manifest(dir);
  if (b.manifest.variant != want) {
    throw DataError(std::string("bundle is ") + to_string(b.manifest.variant) + ", expected " +
                    to_string(want));
  }
  if (b.manifest.expert_files.empty()) throw DataError("bundle has no trained experts");
  try {
    b.alphabet = Alphabet(b.manifest.alphabet);
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("bundle alphabet: ") + e.what());
  }
  b.clusters = std::make_shared<const clustering::ClusterModel>(b.manifest.cluster_model());
}

}  // namespace

OfflineBundle load_offline(const fs::path& dir) {
  OfflineBundle b;
  load_common(b, dir, Variant::kOffline);
  for (const auto& f : b.manifest.expert_files) {
    b.experts.push_back(std::make_shared<const NGramExpert>(NGramExpert::load(dir / f, b.alphabet)));
  }
  if (b.manifest.student_file) {
    auto s = NGramExpert::load(dir / *b.manifest.student_file, b.alphabet);
    if (s.meta().kind != ExpertKind::kDistilled) throw DataError("student file is not a distilled expert");
    b.student = std::make_shared<const NGramExpert>(std::move(s));
  }
  return b;
}

OnlineBundle load_online(const fs::path& dir) {
  OnlineBundle b;
  load_common(b, dir, Variant::kOnline);
  for (const auto& f : b.manifest.expert_files) {
    b.experts.push_back(
        std::make_shared<const online::EditExpert>(online::EditExpert::load(dir / f, b.alphabet)));
  }
  return b;
}

void attach_student(const fs::path& dir, const NGramExpert& student) {
  if (student.meta().kind != ExpertKind::kDistilled) {
    throw InvalidArgument("only a distilled expert can be attached as the student");
  }
  auto m = read_manifest(dir);
  if (m.variant != Variant::kOffline) throw DataError("students belong to offline bundles");
  student.save(dir / kStudentName);
  m.student_file = kStudentName;
  write_manifest(dir, m);
}

std::string RunManifest::canonical_text() const {
  json j;
  j["command"] = command;
  j["config_digest"] = config_digest;
  j["seed"] = seed;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["wall_clock_s"] = wall_clock_s;
  j["tool_version"] = tool_version;
  return j.dump(2) + "\n";
}

void RunManifest::write(const fs::path& path) const {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  out << canonical_text();
  if (!out) throw DataError("cannot write " + path.string());
}

}  // namespace mope::bundle
