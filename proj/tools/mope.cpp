// mope: command-line driver for clustering, training, generation and evaluation.

#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <map>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "mope/bundle.hpp"
#include "mope/corpus.hpp"
#include "mope/distill.hpp"
#include "mope/edit_ops.hpp"
#include "mope/error.hpp"
#include "mope/guess.hpp"
#include "mope/offline.hpp"
#include "mope/online.hpp"
#include "mope/psm.hpp"
#include "mope/psm_server.hpp"

namespace fs = std::filesystem;
using namespace mope;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// --config files are JSON objects. Top-level keys set global options;
// a nested object named after a subcommand sets that subcommand's options.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> out;
    collect(j, {}, out);
    return out;
  }

 private:
  static void collect(const nlohmann::json& j, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& out) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_object()) {
        auto p = parents;
        p.push_back(it.key());
        collect(*it, p, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (it->is_array()) {
        for (const auto& v : *it) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(*it));
      }
      out.push_back(std::move(item));
    }
  }

  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }
};

struct Global {
  std::size_t threads = 1;
};

clustering::KRange parse_k_range(const std::string& s) {
  clustering::KRange r;
  std::vector<std::size_t> parts;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stoul(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InvalidArgument("bad --k-range '" + s + "', expected MIN:MAX[:STEP]");
    }
  }
  if (parts.size() < 2 || parts.size() > 3) {
    throw InvalidArgument("bad --k-range '" + s + "', expected MIN:MAX[:STEP]");
  }
  r.min = parts[0];
  r.max = parts[1];
  if (parts.size() == 3) r.step = parts[2];
  return r;
}

std::string options_digest(const CLI::App* sub) {
  std::string text = sub->get_name();
  for (const auto* opt : sub->get_options()) {
    // where the output goes is not part of the configuration
    if (opt->get_name() == "--help" || opt->get_name() == "--out" || opt->count() == 0) continue;
    text += ";" + opt->get_name() + "=";
    for (const auto& r : opt->results()) text += r + ",";
  }
  return bundle::fnv1a_hex(text);
}

class Run {
 public:
  Run(const CLI::App* sub, std::uint64_t seed)
      : sub_(sub), seed_(seed), t0_(std::chrono::steady_clock::now()) {}

  void finish(std::vector<std::string> inputs, std::vector<std::string> outputs,
              const fs::path& where) const {
    bundle::RunManifest m;
    m.command = sub_->get_name();
    m.config_digest = options_digest(sub_);
    m.seed = seed_;
    m.inputs = std::move(inputs);
    m.outputs = std::move(outputs);
    m.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    m.tool_version = bundle::kToolVersion;
    m.write(where);
  }

 private:
  const CLI::App* sub_;
  std::uint64_t seed_;
  std::chrono::steady_clock::time_point t0_;
};

fs::path run_file_for_dir(const fs::path& dir, const std::string& cmd) {
  return dir / ("run-" + cmd + ".json");
}

fs::path run_file_for_file(const fs::path& file) {
  return fs::path(file.string() + ".run.json");
}

void print_report(const corpus::LoadReport& r, const std::string& what) {
  std::fprintf(stderr, "%s: %zu lines, %zu kept", what.c_str(), r.lines, r.kept);
  for (const auto& [reason, n] : r.rejected) {
    std::fprintf(stderr, ", %zu %s", n, corpus::to_string(reason));
  }
  std::fprintf(stderr, "\n");
}

std::vector<std::string> read_passwords(const fs::path& path, const Alphabet& alphabet) {
  corpus::LoadReport rep;
  auto recs = corpus::load_passwords(path, alphabet, &rep);
  print_report(rep, path.string());
  return corpus::passwords_of(recs);
}

void print_selection(const clustering::KSelectionReport& r) {
  std::printf("k\tsilhouette\n");
  for (std::size_t i = 0; i < r.ks.size(); ++i) std::printf("%zu\t%.6f\n", r.ks[i], r.scores[i]);
  std::printf("chosen k=%zu (threshold %.3f %s)\n", r.chosen, r.threshold,
              r.threshold_met ? "met" : "not met, argmax fallback");
}

std::vector<std::size_t> to_budgets(const std::vector<double>& b) {
  std::vector<std::size_t> out;
  for (double x : b) {
    if (!(x >= 1.0) || x != std::floor(x)) throw InvalidArgument("online budgets must be positive integers");
    out.push_back(static_cast<std::size_t>(x));
  }
  return out;
}

volatile std::sig_atomic_t g_stop = 0;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixture-of-password-experts toolkit"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with option values");
  Global g;
  app.add_option("--threads", g.threads, "Worker threads for sampling")
      ->check(CLI::Range(std::size_t{1}, std::size_t{256}));

  const auto alphabet = Alphabet::printable_ascii();
  std::function<int()> action;

  // cluster
  auto* c_cluster = app.add_subcommand("cluster", "Select k and cluster a password corpus into a bundle skeleton");
  struct {
    std::string in, out, k_range = "2:10";
    double tau = 0.7;
    std::uint64_t seed = 1;
    std::size_t sil_cap = 2000;
    std::string variant = "offline";
  } cl;
  c_cluster->add_option("--in", cl.in, "Password file")->required();
  c_cluster->add_option("--out", cl.out, "Bundle directory")->required();
  c_cluster->add_option("--k-range", cl.k_range, "MIN:MAX[:STEP]")->capture_default_str();
  c_cluster->add_option("--tau", cl.tau, "Silhouette threshold")->capture_default_str();
  c_cluster->add_option("--seed", cl.seed, "Random seed")->capture_default_str();
  c_cluster->add_option("--silhouette-cap", cl.sil_cap, "Rows sampled for the silhouette (0 = all)")->capture_default_str();
  c_cluster->add_option("--variant", cl.variant, "offline|online")->capture_default_str()
      ->check(CLI::IsMember({"offline", "online"}));
  c_cluster->callback([&] {
    action = [&]() -> int {
      Run run(c_cluster, cl.seed);
      clustering::SelectKOptions opt;
      opt.range = parse_k_range(cl.k_range);
      const auto pwds = read_passwords(cl.in, alphabet);
      opt.threshold = cl.tau;
      opt.seed = cl.seed;
      opt.silhouette_cap = cl.sil_cap ? std::optional<std::size_t>(cl.sil_cap) : std::nullopt;
      const auto sel = clustering::cluster_passwords(pwds, opt);
      const bool online = cl.variant == "online";
      auto m = bundle::skeleton(alphabet, sel.fit.model,
                                online ? bundle::Variant::kOnline : bundle::Variant::kOffline,
                                online ? gate::kOnlineBeta : gate::kOfflineBeta);
      m.selection = sel.report;
      m.config = "k_range=" + cl.k_range + ";tau=" + std::to_string(cl.tau) +
                 ";seed=" + std::to_string(cl.seed);
      m.config_digest = bundle::fnv1a_hex(m.config);
      bundle::write_manifest(cl.out, m);
      print_selection(sel.report);
      run.finish({cl.in}, {(fs::path(cl.out) / bundle::kManifestName).string()},
                 run_file_for_dir(cl.out, "cluster"));
      return kExitOk;
    };
  });

  // train-offline / train-online share most flags
  struct TrainFlags {
    std::string in, out, k_range;
    std::optional<std::size_t> k;
    double tau = 0.7;
    std::uint64_t seed = 1;
    std::size_t sil_cap = 2000;
    std::optional<double> gamma;
    std::optional<double> beta;
  };
  auto add_train_flags = [](CLI::App* sub, TrainFlags& f) {
    sub->add_option("--out", f.out, "Bundle directory")->required();
    sub->add_option("--k-range", f.k_range, "MIN:MAX[:STEP]");
    sub->add_option("--k", f.k, "Fixed number of clusters");
    sub->add_option("--tau", f.tau, "Silhouette threshold")->capture_default_str();
    sub->add_option("--seed", f.seed, "Random seed")->capture_default_str();
    sub->add_option("--silhouette-cap", f.sil_cap, "Rows sampled for the silhouette (0 = all)")->capture_default_str();
    sub->add_option("--gamma", f.gamma, "Weight of pretrained counts when fine-tuning");
    sub->add_option("--beta", f.beta, "Gate sparsity parameter");
  };
  // Without --k or --k-range, reuse the k of a skeleton already in --out.
  auto select_of = [](const TrainFlags& f, std::optional<std::size_t>& fixed) {
    clustering::SelectKOptions opt;
    opt.threshold = f.tau;
    opt.seed = f.seed;
    opt.silhouette_cap = f.sil_cap ? std::optional<std::size_t>(f.sil_cap) : std::nullopt;
    fixed = f.k;
    if (!f.k_range.empty()) {
      opt.range = parse_k_range(f.k_range);
    } else if (!f.k) {
      if (fs::exists(fs::path(f.out) / bundle::kManifestName)) {
        fixed = bundle::read_manifest(f.out).k;
      } else {
        opt.range = parse_k_range("2:10");
      }
    }
    return opt;
  };

  auto* c_toff = app.add_subcommand("train-offline", "Train an offline bundle: cluster, pretrain, fine-tune");
  TrainFlags tf;
  std::size_t order = 5;
  double lambda_off = 0.01;
  add_train_flags(c_toff, tf);
  c_toff->add_option("--in", tf.in, "Password file")->required();
  c_toff->add_option("--order", order, "n-gram order")->capture_default_str();
  c_toff->add_option("--lambda", lambda_off, "Smoothing strength")->capture_default_str();
  c_toff->callback([&] {
    action = [&]() -> int {
      Run run(c_toff, tf.seed);
      bundle::OfflineTrainConfig cfg;
      cfg.select = select_of(tf, cfg.fixed_k);
      const auto pwds = read_passwords(tf.in, alphabet);
      cfg.expert.order = order;
      cfg.expert.lambda = lambda_off;
      cfg.expert.gamma = tf.gamma;
      if (tf.beta) cfg.beta = *tf.beta;
      const auto b = bundle::train_offline(pwds, alphabet, cfg);
      bundle::save(b, tf.out);
      print_selection(*b.manifest.selection);
      run.finish({tf.in}, {tf.out}, run_file_for_dir(tf.out, "train-offline"));
      return kExitOk;
    };
  });

  auto* c_ton = app.add_subcommand("train-online", "Train an online bundle from source/target pairs");
  TrainFlags tn;
  double lambda_on = 1e-3;
  std::size_t beam_width = 150, candidates = 1000, max_ops = 4;
  add_train_flags(c_ton, tn);
  c_ton->add_option("--pairs", tn.in, "Pair file (src<TAB>tgt)")->required();
  c_ton->add_option("--lambda", lambda_on, "Smoothing strength")->capture_default_str();
  c_ton->add_option("--beam-width", beam_width, "Beam width B")->capture_default_str();
  c_ton->add_option("--candidates", candidates, "Candidates kept per source")->capture_default_str();
  c_ton->add_option("--max-ops", max_ops, "Edits per candidate")->capture_default_str();
  c_ton->callback([&] {
    action = [&]() -> int {
      Run run(c_ton, tn.seed);
      bundle::OnlineTrainConfig cfg;
      cfg.select = select_of(tn, cfg.fixed_k);
      corpus::LoadReport rep;
      const auto pairs = corpus::load_pairs(tn.in, alphabet, &rep);
      print_report(rep, tn.in);
      if (pairs.empty()) throw DataError("no usable pairs in " + tn.in);
      cfg.expert.lambda = lambda_on;
      cfg.expert.gamma = tn.gamma;
      cfg.expert.max_ops = max_ops;
      if (tn.beta) cfg.beta = *tn.beta;
      cfg.beam_width = beam_width;
      cfg.candidates = candidates;
      const auto b = bundle::train_online(pairs, alphabet, cfg);
      bundle::save(b, tn.out);
      print_selection(*b.manifest.selection);
      run.finish({tn.in}, {tn.out}, run_file_for_dir(tn.out, "train-online"));
      return kExitOk;
    };
  });

  // generate
  auto* c_gen = app.add_subcommand("generate", "Enumerate candidates above a probability threshold");
  struct {
    std::string model, out, gating = "per-prefix";
    offline::GenerationConfig cfg;
    std::size_t memory_cap = 10'000'000;
  } gen;
  c_gen->add_option("--model", gen.model, "Offline bundle directory")->required();
  c_gen->add_option("--out", gen.out, "Candidate TSV")->required();
  c_gen->add_option("--tau-gen", gen.cfg.tau, "Probability threshold")->capture_default_str();
  c_gen->add_option("--lmin", gen.cfg.min_len, "Minimum length")->capture_default_str();
  c_gen->add_option("--lmax", gen.cfg.max_len, "Maximum length")->capture_default_str();
  c_gen->add_option("--hard-cap", gen.cfg.hard_cap, "Abort beyond this many candidates")->capture_default_str();
  c_gen->add_option("--memory-cap", gen.memory_cap, "Candidates held in memory before spilling")->capture_default_str();
  c_gen->add_option("--gating", gen.gating, "per-prefix|whole")->capture_default_str()
      ->check(CLI::IsMember({"per-prefix", "whole"}));
  c_gen->callback([&] {
    action = [&]() -> int {
      Run run(c_gen, 0);
      const auto b = bundle::load_offline(gen.model);
      const auto m = b.mixture(gen.gating == "whole" ? offline::GatingMode::kWholePassword
                                                     : offline::GatingMode::kPerPrefix);
      const auto n = offline::generate_to_file(m, gen.cfg, gen.out, gen.memory_cap);
      std::fprintf(stderr, "%zu candidates\n", n);
      run.finish({gen.model}, {gen.out}, run_file_for_file(gen.out));
      return kExitOk;
    };
  });

  // guess-number
  auto* c_gn = app.add_subcommand("guess-number", "Monte-Carlo guess numbers");
  struct {
    std::string model, in;
    std::vector<std::string> passwords;
    std::size_t samples = 10'000;
    std::uint64_t seed = 1;
    bool student = false;
  } gn;
  c_gn->add_option("--model", gn.model, "Offline bundle directory")->required();
  c_gn->add_option("--password", gn.passwords, "Password to score (repeatable)");
  c_gn->add_option("--in", gn.in, "File of passwords to score");
  c_gn->add_option("--samples", gn.samples, "Sample pool size")->capture_default_str();
  c_gn->add_option("--seed", gn.seed, "Random seed")->capture_default_str();
  c_gn->add_flag("--student", gn.student, "Use the distilled student");
  c_gn->callback([&] {
    action = [&]() -> int {
      auto pwds = gn.passwords;
      if (!gn.in.empty()) {
        auto more = read_passwords(gn.in, alphabet);
        pwds.insert(pwds.end(), more.begin(), more.end());
      }
      if (pwds.empty()) throw InvalidArgument("give --password or --in");
      const auto b = bundle::load_offline(gn.model);
      std::shared_ptr<const CharModel> model;
      if (gn.student) {
        if (!b.student) throw DataError("bundle has no distilled student");
        model = b.student;
      } else {
        model = std::make_shared<const offline::OfflineMope>(b.mixture());
      }
      guess::PoolOptions po{gn.samples, gn.seed, kMaxPasswordLength, g.threads};
      const auto pool = guess::build_pool(*model, po);
      std::printf("password\tprob\tguesses\tlog10_guesses\n");
      for (const auto& p : pwds) {
        if (auto r = corpus::validate(p, alphabet)) {
          throw InvalidArgument(std::string("invalid password: ") + corpus::to_string(*r));
        }
        const auto e = guess::estimate_guess_number(*model, pool, p);
        std::printf("%s\t%s\t%.6g\t%.4f\n", p.c_str(), offline::format_probability(e.prob).c_str(),
                    e.guesses, e.log10_guesses);
      }
      return kExitOk;
    };
  });

  // crack-eval
  auto* c_ce = app.add_subcommand("crack-eval", "Cracked fraction of a test set per guess budget");
  struct {
    std::vector<std::string> models;
    std::string test;
    std::vector<double> budgets{1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
    std::size_t samples = 10'000;
    std::uint64_t seed = 1;
    bool min_auto = false;
  } ce;
  c_ce->add_option("--model", ce.models, "Offline bundle directory (repeat with --min-auto)")->required();
  c_ce->add_option("--test", ce.test, "Test password file")->required();
  c_ce->add_option("--budgets", ce.budgets, "Comma-separated guess budgets")->delimiter(',');
  c_ce->add_option("--samples", ce.samples, "Sample pool size")->capture_default_str();
  c_ce->add_option("--seed", ce.seed, "Random seed")->capture_default_str();
  c_ce->add_flag("--min-auto", ce.min_auto, "Take the best model per password");
  c_ce->callback([&] {
    action = [&]() -> int {
      if (!ce.min_auto && ce.models.size() != 1) {
        throw InvalidArgument("several --model values need --min-auto");
      }
      const auto test = read_passwords(ce.test, alphabet);
      std::vector<std::shared_ptr<const CharModel>> owned;
      std::vector<const CharModel*> models;
      for (const auto& dir : ce.models) {
        const auto b = bundle::load_offline(dir);
        owned.push_back(std::make_shared<const offline::OfflineMope>(b.mixture()));
        models.push_back(owned.back().get());
      }
      guess::PoolOptions po{ce.samples, ce.seed, kMaxPasswordLength, g.threads};
      const auto curve = guess::crack_curve(models, test, ce.budgets,
                                            ce.min_auto ? guess::CrackMode::kMinAuto
                                                        : guess::CrackMode::kSingle,
                                            po);
      std::printf("budget\tfraction\n");
      for (std::size_t i = 0; i < curve.budgets.size(); ++i) {
        std::printf("%.6g\t%.6f\n", curve.budgets[i], curve.fractions[i]);
      }
      return kExitOk;
    };
  });

  // pairs
  auto* c_pairs = app.add_subcommand("pairs", "Extract same-account password pairs");
  struct {
    std::string in, out;
    std::size_t max_ed = 4;
    bool stats = false;
  } pr;
  c_pairs->add_option("--in", pr.in, "account<TAB>password file")->required();
  c_pairs->add_option("--out", pr.out, "Pair TSV")->required();
  c_pairs->add_option("--max-ed", pr.max_ed, "Maximum edit distance")->capture_default_str();
  c_pairs->add_flag("--stats", pr.stats, "Print the edit operation distribution");
  c_pairs->callback([&] {
    action = [&]() -> int {
      Run run(c_pairs, 0);
      corpus::LoadReport rep;
      const auto recs = corpus::load_accounts(pr.in, alphabet, &rep);
      print_report(rep, pr.in);
      const auto pairs = corpus::extract_pairs(recs, pr.max_ed);
      corpus::write_pairs(pr.out, pairs);
      std::fprintf(stderr, "%zu pairs\n", pairs.size());
      if (pr.stats) {
        std::size_t del = 0, ins = 0, rep_ = 0;
        std::map<std::size_t, std::size_t> by_distance;
        for (const auto& p : pairs) {
          const auto script = edit::min_edit_script(p.src, p.tgt);
          ++by_distance[script.size() - 1];
          for (const auto& op : script) {
            if (op.kind == edit::OpKind::kDel) ++del;
            if (op.kind == edit::OpKind::kIns) ++ins;
            if (op.kind == edit::OpKind::kRep) ++rep_;
          }
        }
        const double total = static_cast<double>(std::max<std::size_t>(del + ins + rep_, 1));
        std::printf("op\tcount\tshare\n");
        std::printf("del\t%zu\t%.4f\nins\t%zu\t%.4f\nrep\t%zu\t%.4f\n", del, del / total, ins,
                    ins / total, rep_, rep_ / total);
        std::printf("distance\tpairs\n");
        for (const auto& [d, n] : by_distance) std::printf("%zu\t%zu\n", d, n);
      }
      run.finish({pr.in}, {pr.out}, run_file_for_file(pr.out));
      return kExitOk;
    };
  });

  // beam
  auto* c_beam = app.add_subcommand("beam", "Top-k online candidates for source passwords");
  struct {
    std::string model, in, out;
    std::vector<std::string> sources;
    std::size_t k = 10;
    std::optional<std::size_t> width;
  } bm;
  c_beam->add_option("--model", bm.model, "Online bundle directory")->required();
  c_beam->add_option("--src", bm.sources, "Source password (repeatable)");
  c_beam->add_option("--in", bm.in, "File of source passwords");
  c_beam->add_option("--k", bm.k, "Candidates per source")->capture_default_str();
  c_beam->add_option("--beam-width", bm.width, "Override the bundle's beam width");
  c_beam->add_option("--out", bm.out, "Output TSV (default stdout)");
  c_beam->callback([&] {
    action = [&]() -> int {
      Run run(c_beam, 0);
      auto srcs = bm.sources;
      if (!bm.in.empty()) {
        auto more = read_passwords(bm.in, alphabet);
        srcs.insert(srcs.end(), more.begin(), more.end());
      }
      if (srcs.empty()) throw InvalidArgument("give --src or --in");
      const auto b = bundle::load_online(bm.model);
      const auto m = b.mixture();
      std::ofstream file;
      if (!bm.out.empty()) {
        file.open(bm.out, std::ios::trunc);
        if (!file) throw DataError("cannot write " + bm.out);
      }
      std::ostream& out = bm.out.empty() ? std::cout : file;
      for (const auto& s : srcs) {
        if (auto r = corpus::validate(s, alphabet)) {
          throw InvalidArgument(std::string("invalid source: ") + corpus::to_string(*r));
        }
        const auto cands = online::beam_search(m, s, bm.width.value_or(m.beam_width()), bm.k,
                                               b.manifest.max_ops);
        for (std::size_t i = 0; i < cands.size(); ++i) {
          out << s << '\t' << (i + 1) << '\t' << cands[i].password << '\t'
              << offline::format_probability(cands[i].score) << '\n';
        }
      }
      if (!bm.out.empty()) run.finish({bm.model}, {bm.out}, run_file_for_file(bm.out));
      return kExitOk;
    };
  });

  // online-eval
  auto* c_oe = app.add_subcommand("online-eval", "Online crack rate on test pairs");
  struct {
    std::string model, pairs;
    std::vector<double> budgets{10, 100, 1000};
  } oe;
  c_oe->add_option("--model", oe.model, "Online bundle directory")->required();
  c_oe->add_option("--pairs", oe.pairs, "Test pair file")->required();
  c_oe->add_option("--budgets", oe.budgets, "Comma-separated budgets")->delimiter(',');
  c_oe->callback([&] {
    action = [&]() -> int {
      corpus::LoadReport rep;
      const auto pairs = corpus::load_pairs(oe.pairs, alphabet, &rep);
      print_report(rep, oe.pairs);
      if (pairs.empty()) throw DataError("no usable pairs in " + oe.pairs);
      const auto b = bundle::load_online(oe.model);
      const auto budgets = to_budgets(oe.budgets);
      const auto rates = online::online_crack_rate(b.mixture(), pairs, budgets, b.manifest.max_ops);
      std::printf("budget\trate\n");
      for (std::size_t i = 0; i < budgets.size(); ++i) std::printf("%zu\t%.6f\n", budgets[i], rates[i]);
      return kExitOk;
    };
  });

  // distill
  auto* c_dist = app.add_subcommand("distill", "Distill the bundle's mixture into a student");
  struct {
    std::string model, in;
    distill::DistillConfig cfg;
    std::uint64_t seed = 1;
  } ds;
  c_dist->add_option("--model", ds.model, "Offline bundle directory")->required();
  c_dist->add_option("--in", ds.in, "Corpus the prefixes are drawn from")->required();
  c_dist->add_option("--alpha", ds.cfg.alpha, "Weight of the soft term")->capture_default_str();
  c_dist->add_option("--temperature", ds.cfg.temperature, "Softening temperature")->capture_default_str();
  c_dist->add_option("--samples", ds.cfg.sample_count, "Passwords drawn from the corpus")->capture_default_str();
  c_dist->add_option("--seed", ds.seed, "Random seed")->capture_default_str();
  c_dist->callback([&] {
    action = [&]() -> int {
      Run run(c_dist, ds.seed);
      const auto pwds = read_passwords(ds.in, alphabet);
      const auto b = bundle::load_offline(ds.model);
      const auto& first = *b.experts.front();
      NGramConfig scfg;
      scfg.order = first.order();
      scfg.lambda = first.counts().lambda();
      scfg.level_weights = first.counts().level_weights();
      const auto teacher = b.mixture();
      const auto student = distill::distill(teacher, pwds, scfg, ds.cfg, ds.seed);
      bundle::attach_student(ds.model, student);
      run.finish({ds.model, ds.in}, {(fs::path(ds.model) / bundle::kStudentName).string()},
                 run_file_for_dir(ds.model, "distill"));
      return kExitOk;
    };
  });

  // serve
  auto* c_serve = app.add_subcommand("serve", "HTTP strength meter");
  struct {
    std::string model;
    psm::ServerConfig server;
    std::vector<std::string> origins;
    std::size_t pool = 10'000;
    std::uint64_t seed = 1;
    bool full = false;
  } sv;
  c_serve->add_option("--model", sv.model, "Offline bundle directory (default $MOPE_MODEL_DIR)");
  c_serve->add_option("--port", sv.server.port, "Listen port")->capture_default_str();
  c_serve->add_option("--host", sv.server.host, "Listen address")->capture_default_str();
  c_serve->add_option("--cors-origin", sv.origins, "Allowed browser origin (repeatable)");
  c_serve->add_option("--pool", sv.pool, "Cached sample pool size")->capture_default_str();
  c_serve->add_option("--seed", sv.seed, "Random seed")->capture_default_str();
  c_serve->add_flag("--full", sv.full, "Meter on the full mixture even when a student exists");
  c_serve->callback([&] {
    action = [&]() -> int {
      std::string dir = sv.model;
      if (dir.empty()) {
        if (const char* env = std::getenv("MOPE_MODEL_DIR")) dir = env;
      }
      if (!sv.origins.empty()) sv.server.cors_origins = sv.origins;
      psm::StrengthServer server(sv.server);
      const int port = server.bind();
      std::fprintf(stderr, "listening on %s:%d\n", sv.server.host.c_str(), port);
      std::thread loader([&] {
        if (dir.empty()) {
          std::fprintf(stderr, "no model: set --model or MOPE_MODEL_DIR\n");
          return;
        }
        try {
          guess::PoolOptions po{sv.pool, sv.seed, kMaxPasswordLength, g.threads};
          server.set_meter(psm::meter_from_bundle(dir, po, !sv.full));
          std::fprintf(stderr, "model loaded from %s\n", dir.c_str());
        } catch (const std::exception& e) {
          std::fprintf(stderr, "model not loaded: %s\n", e.what());
        }
      });
      std::signal(SIGINT, [](int) { g_stop = 1; });
      std::signal(SIGTERM, [](int) { g_stop = 1; });
      std::thread watcher([&] {
        while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        server.stop();
      });
      server.listen();
      g_stop = 1;
      watcher.join();
      loader.join();
      return kExitOk;
    };
  });

  // inspect
  auto* c_insp = app.add_subcommand("inspect", "Print a bundle manifest and cluster statistics");
  std::string insp_dir;
  c_insp->add_option("--model", insp_dir, "Bundle directory")->required();
  c_insp->callback([&] {
    action = [&]() -> int {
      const auto m = bundle::read_manifest(insp_dir);
      std::cout << m.canonical_text();
      std::size_t total = 0;
      for (auto s : m.cluster_sizes) total += s;
      std::printf("cluster\tsize\tshare\tlength\tdigits\tlower\tupper\tspecial\n");
      for (std::size_t j = 0; j < m.k; ++j) {
        // centers back in raw feature units
        std::array<double, 5> raw{};
        for (std::size_t d = 0; d < raw.size(); ++d) {
          raw[d] = m.centers[j][d] * m.standardizer.stds[d] + m.standardizer.means[d];
        }
        std::printf("%zu\t%zu\t%.4f\t%.2f\t%.3f\t%.3f\t%.3f\t%.3f\n", j, m.cluster_sizes[j],
                    total ? static_cast<double>(m.cluster_sizes[j]) / total : 0.0, raw[0], raw[1],
                    raw[2], raw[3], raw[4]);
      }
      return kExitOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const offline::CandidateCapExceeded& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
}
