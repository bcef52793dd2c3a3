#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mope/clustering.hpp"
#include "mope/expert.hpp"
#include "mope/offline.hpp"
#include "mope/online.hpp"

namespace mope::bundle {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kManifestName = "mope.json";
inline constexpr const char* kStudentName = "student.bin";

enum class Variant { kOffline, kOnline };

const char* to_string(Variant v);

/// Contents of mope.json. A bundle written by `mope cluster` carries the
/// clustering only; expert_files stays empty until training.
struct Manifest {
  int schema_version = kSchemaVersion;
  Variant variant = Variant::kOffline;
  std::string alphabet;
  std::size_t k = 0;
  double beta = gate::kOfflineBeta;
  features::Standardizer standardizer;
  std::vector<std::vector<double>> centers;
  std::vector<std::size_t> cluster_sizes;
  std::vector<std::string> expert_files;
  std::string config;         // human-readable training configuration
  std::string config_digest;  // FNV-1a of `config`, hex
  std::optional<std::string> student_file;
  std::size_t beam_width = 150;
  std::size_t candidates = 1000;
  std::size_t max_ops = 4;
  std::optional<clustering::KSelectionReport> selection;

  clustering::ClusterModel cluster_model() const;
  /// Sorted keys, two-space indent, shortest round-trip doubles.
  std::string canonical_text() const;
  static Manifest parse(const std::string& text);
};

std::string fnv1a_hex(std::string_view text);

Manifest read_manifest(const std::filesystem::path& dir);
void write_manifest(const std::filesystem::path& dir, const Manifest& m);

/// Fills the clustering fields of a manifest from a fitted model.
Manifest skeleton(const Alphabet& alphabet, const clustering::ClusterModel& clusters,
                  Variant variant, double beta);

struct OfflineBundle {
  Manifest manifest;
  Alphabet alphabet = Alphabet::printable_ascii();
  std::shared_ptr<const clustering::ClusterModel> clusters;
  std::vector<std::shared_ptr<const NGramExpert>> experts;
  std::shared_ptr<const NGramExpert> student;  // null when not distilled

  offline::OfflineMope mixture(offline::GatingMode mode = offline::GatingMode::kPerPrefix) const;
};

struct OnlineBundle {
  Manifest manifest;
  Alphabet alphabet = Alphabet::printable_ascii();
  std::shared_ptr<const clustering::ClusterModel> clusters;
  std::vector<std::shared_ptr<const online::EditExpert>> experts;

  online::OnlineMope mixture() const;
};

struct OfflineTrainConfig {
  clustering::SelectKOptions select;
  std::optional<std::size_t> fixed_k;  // skip the k search
  NGramConfig expert;
  double beta = gate::kOfflineBeta;
};

/// Cluster, pretrain on the whole corpus, fine-tune one expert per cluster.
OfflineBundle train_offline(std::span<const std::string> corpus, const Alphabet& alphabet,
                            const OfflineTrainConfig& cfg);

struct OnlineTrainConfig {
  clustering::SelectKOptions select;
  std::optional<std::size_t> fixed_k;
  online::OnlineConfig expert;
  double beta = gate::kOnlineBeta;
  std::size_t beam_width = 150;
  std::size_t candidates = 1000;
};

/// Clusters on the source side of the pairs; cluster j fine-tunes on the
/// pairs whose source landed in j.
OnlineBundle train_online(std::span<const corpus::PairRecord> pairs, const Alphabet& alphabet,
                          const OnlineTrainConfig& cfg);

void save(const OfflineBundle& b, const std::filesystem::path& dir);
void save(const OnlineBundle& b, const std::filesystem::path& dir);
/// Throws DataError on a missing or inconsistent bundle.
OfflineBundle load_offline(const std::filesystem::path& dir);
OnlineBundle load_online(const std::filesystem::path& dir);

/// Stores the student next to the experts and flags it in the manifest.
void attach_student(const std::filesystem::path& dir, const NGramExpert& student);

struct RunManifest {
  std::string command;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double wall_clock_s = 0.0;
  std::string tool_version;

  std::string canonical_text() const;
  void write(const std::filesystem::path& path) const;
};

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace mope::bundle
