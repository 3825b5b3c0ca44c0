#include "specnet/trainer.hpp"

#include <cmath>
#include <numeric>

#include "specnet/corpus.hpp"
#include "specnet/detector.hpp"
#include "specnet/embeddings.hpp"
#include "specnet/model/model.hpp"
#include "specnet/nn/optim.hpp"
#include "specnet/parallel.hpp"
#include "specnet/rng.hpp"

namespace specnet {

namespace {

struct Validation {
  double macro_f1 = 0;
  double accuracy = 0;
  double tau = 0;
  double calibration_f1 = 0;
};

std::vector<InternalLabel> labels_of(std::span<const PreparedPage> pages) {
  std::vector<InternalLabel> out;
  for (const auto& p : pages) out.push_back(*p.label);
  return out;
}

Validation validate(const Model<float>& model, std::span<const PreparedPage> pages, double beta, int threads) {
  std::vector<Scores> scores(pages.size());
  parallel_for(pages.size(), threads, [&](std::size_t i) { scores[i] = score_page(model, pages[i]); });
  const auto labels = labels_of(pages);
  Validation v;
  if (has_reconstruction(model.config().ablation)) {
    std::vector<double> eps;
    for (const auto& s : scores) eps.push_back(*s.epsilon);
    Calibration c = calibrate_threshold(eps, labels);
    v.tau = c.tau;
    v.calibration_f1 = c.f1;
  }
  std::vector<int> external, verdicts;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    external.push_back(labels[i].to_external());
    verdicts.push_back(decide(scores[i], v.tau, beta, model.config().ablation).verdict);
  }
  auto m = compute_metrics(external, verdicts);
  v.macro_f1 = m.macro_f1;
  v.accuracy = m.accuracy;
  return v;
}

std::vector<PreparedPage> labeled_only(std::vector<PreparedPage> pages, std::vector<std::string>& warnings) {
  std::vector<PreparedPage> out;
  for (auto& p : pages) {
    if (p.label) out.push_back(std::move(p));
    else warnings.push_back("unlabeled page skipped");
  }
  return out;
}

void require_both_classes(std::span<const PreparedPage> pages) {
  std::size_t benign = 0;
  for (const auto& p : pages) benign += p.label->benign();
  if (benign == 0 || benign == pages.size()) {
    throw Error(ErrorKind::CalibrationDegenerate, "validation set must contain both classes");
  }
}

}  // namespace

TrainResult train(const TrainConfig& config, std::span<const RawPage> train_pages,
                  std::span<const RawPage> validation_pages, const TrainOptions& options) {
  validate_config(config);
  TrainResult result;
  auto train_corpus = ingest_pages(train_pages, config);
  auto val_corpus = ingest_pages(validation_pages, config);
  for (auto* c : {&train_corpus, &val_corpus}) {
    result.warnings.insert(result.warnings.end(), c->errors.begin(), c->errors.end());
  }
  if (train_corpus.trees.empty()) throw Error(ErrorKind::EmptyDataset, "no usable training pages");

  Rng master(config.seed);
  TokenVocabulary vocab = build_vocabulary(train_corpus.trees);
  Word2VecOptions w2v;
  w2v.dim = config.feature_dim;
  w2v.negatives = config.w2v_negatives;
  w2v.epochs = config.w2v_epochs;
  w2v.learning_rate = config.w2v_learning_rate;
  w2v.seed = master.bits();
  EmbeddingTable table = train_embeddings(train_corpus.trees, vocab, w2v);

  auto train_set = labeled_only(prepare_pages(train_corpus, vocab), result.warnings);
  auto val_set = labeled_only(prepare_pages(val_corpus, vocab), result.warnings);
  if (train_set.empty()) throw Error(ErrorKind::EmptyDataset, "no labeled training pages");
  if (val_set.empty()) throw Error(ErrorKind::EmptyDataset, "no labeled validation pages");
  require_both_classes(val_set);

  Model<float> model(config, table.vectors, master.bits());
  auto& store = model.parameters();
  Rng shuffler = master.fork();
  nn::Adam<float> adam(store);
  nn::Sgd<float> sgd;
  nn::CosineWarmRestarts schedule(config.learning_rate, config.schedule_floor, config.schedule_t0,
                                  config.schedule_mult);
  const double beta = config.effective_beta();

  std::vector<nn::Matrix<float>> best_values;
  auto snapshot = [&] {
    best_values.clear();
    for (const auto& p : store) best_values.push_back(p.value);
  };
  Validation best;
  best.macro_f1 = -1;
  int best_epoch = 0;
  int since_best = 0;
  int epochs_run = 0;

  const std::size_t batch = static_cast<std::size_t>(config.batch_size);
  const std::size_t batches = (train_set.size() + batch - 1) / batch;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<nn::GradientBuffer<float>> buffers(batch);
  std::vector<double> losses(batch);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffler.shuffle(order.begin(), order.end());
    double epoch_loss = 0;
    double lr = 0;
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t begin = b * batch;
      const std::size_t count = std::min(batch, train_set.size() - begin);
      parallel_for(count, config.threads, [&](std::size_t i) {
        const PreparedPage& page = train_set[order[begin + i]];
        buffers[i] = store.zero_buffer();
        nn::Tape<float> tape;
        auto forward = model.forward(tape, page);
        auto loss = model.loss(tape, forward, *page.label);
        losses[i] = static_cast<double>(loss.item());
        if (!std::isfinite(losses[i])) {
          throw Error(ErrorKind::NonFiniteLoss, "epoch " + std::to_string(epoch + 1) + ", batch " + std::to_string(b));
        }
        tape.backward(loss, buffers[i], &store);
      });
      store.zero_grad();
      const float scale = 1.0f / static_cast<float>(count);
      for (std::size_t i = 0; i < count; ++i) {
        store.add_to_grad(buffers[i], scale);
        epoch_loss += losses[i];
      }
      lr = schedule.at(static_cast<double>(epoch) + static_cast<double>(b) / static_cast<double>(batches));
      if (config.optimizer == OptimizerKind::Adam) adam.step(store, lr);
      else sgd.step(store, lr);
    }
    ++epochs_run;

    Validation v = validate(model, val_set, beta, config.threads);
    EpochReport report{epoch + 1, epoch_loss / static_cast<double>(train_set.size()), v.macro_f1, lr, v.tau, false};
    if (v.macro_f1 > best.macro_f1) {
      best = v;
      best_epoch = epoch + 1;
      since_best = 0;
      snapshot();
      report.improved = true;
    } else {
      ++since_best;
    }
    result.history.push_back(report);
    if (options.on_epoch) options.on_epoch(report);
    if (since_best >= config.patience) break;
  }

  for (std::size_t i = 0; i < store.size(); ++i) store[i].value = best_values[i];
  Validation final_check = validate(model, val_set, beta, config.threads);

  ModelBundle& bundle = result.bundle;
  bundle.config = config;
  bundle.vocabulary = std::move(vocab);
  bundle.embeddings = std::move(table.vectors);
  bundle.parameters = store;
  bundle.tau = final_check.tau;
  bundle.beta = beta;
  bundle.metadata.seed = config.seed;
  bundle.metadata.epochs_run = epochs_run;
  bundle.metadata.best_epoch = best_epoch;
  bundle.metadata.validation_macro_f1 = final_check.macro_f1;
  bundle.metadata.validation_accuracy = final_check.accuracy;
  bundle.metadata.calibration_f1 = final_check.calibration_f1;
  bundle.metadata.embedding_fallback = table.fallback;
  bundle.metadata.train_pages = train_set.size();
  bundle.metadata.validation_pages = val_set.size();
  return result;
}

Calibration calibrate_bundle(ModelBundle& bundle, std::span<const RawPage> validation_pages, int threads,
                             std::vector<std::string>* errors) {
  if (!has_reconstruction(bundle.config.ablation)) {
    throw Error(ErrorKind::ConfigError, "variant " + std::string(to_string(bundle.config.ablation)) +
                                            " has no reconstruction threshold");
  }
  Detector detector(bundle);
  std::vector<std::optional<Scores>> scores(validation_pages.size());
  std::vector<std::string> failures(validation_pages.size());
  parallel_for(validation_pages.size(), threads, [&](std::size_t i) {
    try {
      scores[i] = detector.score(detector.prepare(validation_pages[i]));
    } catch (const Error& e) {
      failures[i] = validation_pages[i].source + ": " + e.what();
    }
  });
  std::vector<double> eps;
  std::vector<InternalLabel> labels;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i]) {
      if (errors) errors->push_back(failures[i]);
      continue;
    }
    if (!validation_pages[i].label) continue;
    eps.push_back(*scores[i]->epsilon);
    labels.push_back(InternalLabel::from_external(*validation_pages[i].label));
  }
  if (eps.empty()) throw Error(ErrorKind::EmptyDataset, "no labeled validation pages");
  Calibration c = calibrate_threshold(eps, labels);
  bundle.tau = c.tau;
  bundle.metadata.calibration_f1 = c.f1;
  return c;
}

}  // namespace specnet
