#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "specnet/config.hpp"
#include "specnet/detector.hpp"
#include "specnet/error.hpp"
#include "specnet/manifest.hpp"
#include "specnet/parallel.hpp"
#include "specnet/perturb.hpp"
#include "specnet/synth.hpp"
#include "specnet/trainer.hpp"

namespace fs = std::filesystem;
using namespace specnet;

namespace {

enum Exit { kOk = 0, kModel = 2, kData = 3, kConfig = 4, kNumeric = 5 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnsupportedVersion:
    case ErrorKind::CorruptBundle: return kModel;
    case ErrorKind::ConfigError: return kConfig;
    case ErrorKind::NonFiniteGradient:
    case ErrorKind::NonFiniteLoss:
    case ErrorKind::ShapeError: return kNumeric;
    default: return kData;
  }
}

struct Failure {
  int code;
  std::string message;
};

struct Globals {
  std::string config;
  std::string model;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool quiet = false;
};

void note(const Globals& g, const std::string& line) {
  if (!g.quiet) std::cerr << line << '\n';
}

template <class T>
std::optional<T> env_number(const char* name) {
  const char* raw = std::getenv(name);
  if (!raw || !*raw) return std::nullopt;
  std::istringstream in(raw);
  T value{};
  if (!(in >> value) || !in.eof()) throw Failure{kConfig, std::string(name) + ": not a number: " + raw};
  return value;
}

TrainConfig resolve_config(const Globals& g) {
  TrainConfig config;
  if (!g.config.empty()) {
    std::vector<std::string> warnings;
    config = load_config(g.config, &warnings);
    for (const auto& w : warnings) note(g, "warning: " + w);
  }
  if (auto s = g.seed ? g.seed : env_number<std::uint64_t>("SPECNET_SEED")) config.seed = *s;
  if (auto t = g.threads ? g.threads : env_number<int>("SPECNET_THREADS")) config.threads = *t;
  validate_config(config);
  return config;
}

int resolve_threads(const Globals& g) {
  auto t = g.threads ? g.threads : env_number<int>("SPECNET_THREADS");
  if (t && *t < 1) throw Failure{kConfig, "threads must be >= 1"};
  return t.value_or(1);
}

ModelBundle open_model(const std::string& path) {
  if (path.empty()) throw Failure{kConfig, "--model is required"};
  try {
    return load_bundle(path);
  } catch (const Error& e) {
    throw Failure{kModel, e.what()};
  }
}

std::vector<RawPage> read_pages(const Globals& g, const std::string& manifest) {
  LoadedPages loaded = load_manifest(manifest);
  for (const auto& e : loaded.errors) std::cerr << "error: " << e << '\n';
  if (loaded.skipped) note(g, "skipped " + std::to_string(loaded.skipped) + " malformed manifest lines");
  return std::move(loaded.pages);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
}

int cmd_train(const Globals& g, const std::string& train_path, const std::string& val_path,
              const std::optional<std::string>& ablation, const std::optional<int>& epochs) {
  if (g.model.empty()) throw Failure{kConfig, "--model names the output bundle and is required"};
  TrainConfig config = resolve_config(g);
  if (ablation) config.ablation = parse_ablation(*ablation);
  if (epochs) config.epochs = *epochs;
  validate_config(config);
  auto train_pages = read_pages(g, train_path);
  auto val_pages = read_pages(g, val_path);
  TrainOptions options;
  options.on_epoch = [&](const EpochReport& r) {
    std::ostringstream line;
    line << "epoch " << r.epoch << " loss " << r.train_loss << " val_macro_f1 " << r.validation_macro_f1 << " lr "
         << r.learning_rate << (r.improved ? " *" : "");
    note(g, line.str());
  };
  TrainResult result = train(config, train_pages, val_pages, options);
  for (const auto& w : result.warnings) note(g, "warning: " + w);
  save_bundle(result.bundle, g.model);
  const auto& m = result.bundle.metadata;
  std::cout << nlohmann::json{{"model", g.model},
                              {"epochs_run", m.epochs_run},
                              {"best_epoch", m.best_epoch},
                              {"validation_macro_f1", m.validation_macro_f1},
                              {"tau", result.bundle.tau}}
                   .dump()
            << '\n';
  return kOk;
}

int cmd_calibrate(const Globals& g, const std::string& val_path, const std::string& out_path) {
  ModelBundle bundle = open_model(g.model);
  auto pages = read_pages(g, val_path);
  std::vector<std::string> errors;
  Calibration c = calibrate_bundle(bundle, pages, resolve_threads(g), &errors);
  for (const auto& e : errors) std::cerr << "error: " << e << '\n';
  save_bundle(bundle, out_path.empty() ? g.model : out_path);
  std::cout << nlohmann::json{{"tau", c.tau}, {"f1", c.f1}}.dump() << '\n';
  return kOk;
}

int cmd_eval(const Globals& g, const std::string& manifest, const std::string& out_path) {
  Detector detector(open_model(g.model));
  auto pages = read_pages(g, manifest);
  Evaluation ev = evaluate(detector, pages, resolve_threads(g));
  for (const auto& e : ev.errors) std::cerr << "error: " << e << '\n';
  const std::string text = ev.metrics.to_json().dump(2);
  if (!out_path.empty()) write_text(out_path, text + "\n");
  std::cout << text << '\n';
  return kOk;
}

int cmd_predict(const Globals& g, const std::string& manifest, const std::string& html_path,
                const std::optional<std::string>& domain) {
  Detector detector(open_model(g.model));
  std::vector<RawPage> pages;
  if (!html_path.empty()) {
    RawPage page;
    page.html = read_file_bytes(html_path);
    page.domain = domain;
    page.source = html_path;
    pages.push_back(std::move(page));
  } else {
    pages = read_pages(g, manifest);
  }
  std::vector<std::optional<ReconstructionReport>> reports(pages.size());
  std::vector<std::string> failures(pages.size());
  parallel_for(pages.size(), resolve_threads(g), [&](std::size_t i) {
    try {
      reports[i] = detector.predict(pages[i]);
    } catch (const Error& e) {
      failures[i] = pages[i].source + ": " + e.what();
    }
  });
  std::size_t done = 0;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    if (!reports[i]) {
      std::cerr << "error: " << failures[i] << '\n';
      continue;
    }
    auto j = reports[i]->to_json();
    j["source"] = pages[i].source;
    std::cout << j.dump() << '\n';
    ++done;
  }
  if (done == 0) throw Failure{kData, "no page could be processed"};
  return kOk;
}

int cmd_bench(const Globals& g, const std::string& manifest, int repeats) {
  Detector detector(open_model(g.model));
  auto pages = read_pages(g, manifest);
  struct Bucket {
    const char* name;
    std::size_t lo, hi;
    std::vector<double> ms;
  };
  std::vector<Bucket> buckets = {{"<500", 0, 500, {}},
                                 {"500-2000", 500, 2000, {}},
                                 {"2000-10000", 2000, 10000, {}},
                                 {">10000", 10000, SIZE_MAX, {}}};
  std::vector<double> all;
  for (const auto& page : pages) {
    for (int r = 0; r < repeats; ++r) {
      ReconstructionReport rep;
      try {
        rep = detector.predict(page);
      } catch (const Error& e) {
        std::cerr << "error: " << page.source << ": " << e.what() << '\n';
        break;
      }
      all.push_back(rep.latency_ms);
      for (auto& b : buckets) {
        if (rep.nodes >= b.lo && rep.nodes < b.hi) b.ms.push_back(rep.latency_ms);
      }
    }
  }
  if (all.empty()) throw Failure{kData, "no page could be processed"};
  auto summary = [](const std::vector<double>& ms) {
    auto s = summarize_latency(ms);
    return nlohmann::json{{"pages", ms.size()},
                          {"mean_ms", s.mean_ms},
                          {"median_ms", s.median_ms},
                          {"p90_ms", s.p90_ms},
                          {"max_ms", *std::max_element(ms.begin(), ms.end())}};
  };
  nlohmann::json out{{"threads", 1}, {"overall", summary(all)}, {"buckets", nlohmann::json::object()}};
  for (const auto& b : buckets) out["buckets"][b.name] = b.ms.empty() ? nlohmann::json(nullptr) : summary(b.ms);
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int cmd_synth(const Globals& g, SynthOptions options, const std::string& out_dir, const std::vector<std::size_t>& split) {
  if (g.seed) options.seed = *g.seed;
  else if (auto s = env_number<std::uint64_t>("SPECNET_SEED")) options.seed = *s;
  std::optional<SplitCounts> counts;
  if (!split.empty()) {
    if (split.size() != 3) throw Failure{kConfig, "--split takes train,val,test counts per class"};
    counts = SplitCounts{split[0], split[1], split[2]};
  }
  auto written = write_corpus(synthesize(options), out_dir, counts);
  note(g, "wrote " + std::to_string(written.pages) + " pages to " + out_dir);
  return kOk;
}

int cmd_perturb(const Globals& g, const std::string& manifest, const std::string& kinds, double intensity,
                const std::string& out_dir) {
  std::vector<PerturbationKind> plan;
  std::stringstream in(kinds);
  for (std::string item; std::getline(in, item, ',');) plan.push_back(parse_perturbation_kind(item));
  if (plan.empty()) throw Failure{kConfig, "--kind is empty"};
  if (!(intensity >= 0 && intensity <= 1)) throw Failure{kConfig, "--intensity must lie in [0, 1]"};
  std::uint64_t seed = 1;
  if (g.seed) seed = *g.seed;
  else if (auto s = env_number<std::uint64_t>("SPECNET_SEED")) seed = *s;

  auto pages = read_pages(g, manifest);
  fs::create_directories(fs::path(out_dir) / "pages");
  std::ofstream out_manifest(fs::path(out_dir) / "manifest.jsonl", std::ios::trunc);
  std::ofstream log(fs::path(out_dir) / "perturbations.jsonl", std::ios::trunc);
  if (!out_manifest || !log) throw Error(ErrorKind::IoFailure, "cannot write to " + out_dir);
  for (std::size_t i = 0; i < pages.size(); ++i) {
    std::string html = pages[i].html;
    nlohmann::json entry{{"source", pages[i].source}, {"records", nlohmann::json::array()}};
    for (std::size_t k = 0; k < plan.size(); ++k) {
      PerturbationSpec spec{plan[k], intensity, seed + i * plan.size() + k};
      PerturbationResult r = perturb(html, spec);
      html = std::move(r.html);
      for (const auto& rec : r.log) {
        entry["records"].push_back({{"kind", to_string(rec.kind)}, {"site", rec.site}, {"detail", rec.detail}});
      }
    }
    char name[32];
    std::snprintf(name, sizeof(name), "pages/%05zu.html", i);
    write_text(fs::path(out_dir) / name, html);
    write_manifest_line(out_manifest, name, pages[i].domain, pages[i].label);
    entry["html_path"] = name;
    log << entry.dump() << '\n';
  }
  note(g, "perturbed " + std::to_string(pages.size()) + " pages into " + out_dir);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"specnet: structural phishing detector over HTML DOM trees"};
  app.require_subcommand(1, 1);
  Globals g;
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("--config", g.config, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--model", g.model, "model bundle path");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (env SPECNET_SEED)");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads (env SPECNET_THREADS)");
  app.add_flag("--quiet", g.quiet, "suppress progress output");

  std::string train_path, val_path, manifest, html_path, out_path, out_dir;
  std::optional<std::string> domain, ablation;
  std::optional<int> epochs;

  auto* train_cmd = app.add_subcommand("train", "train a model bundle (written to --model)");
  train_cmd->add_option("--train", train_path, "training manifest")->required();
  train_cmd->add_option("--val", val_path, "validation manifest")->required();
  train_cmd->add_option("--ablation", ablation, "variant to train");
  train_cmd->add_option("--epochs", epochs, "override the configured epoch budget");

  auto* calibrate_cmd = app.add_subcommand("calibrate", "recompute the reconstruction threshold");
  calibrate_cmd->add_option("--val", val_path, "validation manifest")->required();
  calibrate_cmd->add_option("--out", out_path, "output bundle (default: overwrite --model)");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate on a labeled manifest");
  eval_cmd->add_option("--manifest", manifest, "labeled manifest")->required();
  eval_cmd->add_option("--out", out_path, "also write the report here");

  auto* predict_cmd = app.add_subcommand("predict", "JSON-lines verdicts on stdout");
  auto* predict_manifest = predict_cmd->add_option("--manifest", manifest, "page manifest");
  auto* predict_html = predict_cmd->add_option("--html", html_path, "single HTML file");
  auto* predict_domain = predict_cmd->add_option("--domain", domain, "domain of the single page");
  predict_manifest->excludes(predict_html);
  predict_domain->needs(predict_html);

  int repeats = 1;
  auto* bench_cmd = app.add_subcommand("bench", "single-threaded latency by node-count bucket");
  bench_cmd->add_option("--manifest", manifest, "page manifest")->required();
  bench_cmd->add_option("--repeats", repeats, "timed runs per page")->check(CLI::PositiveNumber);

  SynthOptions synth;
  std::vector<std::size_t> split;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
  synth_cmd->add_option("--out", out_dir, "output directory")->required();
  synth_cmd->add_option("--templates", synth.templates, "template count (even: benign-like, odd: kit-like)")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--pages", synth.pages_per_template, "pages per template")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--noise", synth.noise, "per-element mutation probability")->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--target-nodes", synth.target_nodes, "grow each template to about this many nodes");
  synth_cmd->add_option("--split", split, "train,val,test pages per class")->delimiter(',');

  std::string kinds = "shuffle_siblings";
  double intensity = 0.1;
  auto* perturb_cmd = app.add_subcommand("perturb", "apply structural perturbations to a manifest");
  perturb_cmd->add_option("--manifest", manifest, "input manifest")->required();
  perturb_cmd->add_option("--kind", kinds, "comma list of shuffle_siblings, insert_redundant, wrap_subtree");
  perturb_cmd->add_option("--intensity", intensity, "fraction of eligible sites");
  perturb_cmd->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  if (seed_opt->count()) g.seed = seed;
  if (threads_opt->count()) g.threads = threads;

  try {
    if (*train_cmd) return cmd_train(g, train_path, val_path, ablation, epochs);
    if (*calibrate_cmd) return cmd_calibrate(g, val_path, out_path);
    if (*eval_cmd) return cmd_eval(g, manifest, out_path);
    if (*predict_cmd) {
      if (manifest.empty() == html_path.empty()) throw Failure{kConfig, "give exactly one of --manifest or --html"};
      return cmd_predict(g, manifest, html_path, domain);
    }
    if (*bench_cmd) return cmd_bench(g, manifest, repeats);
    if (*synth_cmd) return cmd_synth(g, synth, out_dir, split);
    if (*perturb_cmd) return cmd_perturb(g, manifest, kinds, intensity, out_dir);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kConfig;
}
