#include "specnet/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "specnet/error.hpp"
#include "specnet/manifest.hpp"

namespace specnet {

namespace {

struct AblationName {
  Ablation value;
  std::string_view name;
};

constexpr AblationName kAblations[] = {
    {Ablation::None, "none"},
    {Ablation::NoClassificationLoss, "no_cls_loss"},
    {Ablation::NoReconstructionLoss, "no_recon_loss"},
    {Ablation::NoDecoder, "no_decoder"},
    {Ablation::NoAutoencoder, "no_ae"},
    {Ablation::NoBaseGnn, "no_base_gnn"},
    {Ablation::NoDomain, "no_domain"},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad(std::string_view key, const std::string& why) {
  throw Error(ErrorKind::ConfigError, std::string(key) + ": " + why);
}

long long to_int(std::string_view key, std::string_view v) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, "expected an integer, got '" + std::string(v) + "'");
  return out;
}

double to_double(std::string_view key, std::string_view v) {
  std::string s(v);
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    bad(key, "expected a number, got '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(out)) bad(key, "expected a number, got '" + s + "'");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, "expected true or false, got '" + std::string(v) + "'");
}

std::vector<int> to_int_list(std::string_view key, std::string_view v) {
  std::vector<int> out;
  while (!v.empty()) {
    auto comma = v.find(',');
    auto item = trim(v.substr(0, comma));
    out.push_back(static_cast<int>(to_int(key, item)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  if (out.empty()) bad(key, "empty list");
  return out;
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

template <class T>
bool one_of(T v, std::initializer_list<T> allowed) {
  return std::find(allowed.begin(), allowed.end(), v) != allowed.end();
}

bool close_to_any(double v, std::initializer_list<double> allowed) {
  return std::any_of(allowed.begin(), allowed.end(), [v](double a) { return std::abs(v - a) < 1e-12; });
}

}  // namespace

std::string_view to_string(Ablation a) {
  for (const auto& e : kAblations) {
    if (e.value == a) return e.name;
  }
  return "?";
}

Ablation parse_ablation(std::string_view name) {
  for (const auto& e : kAblations) {
    if (e.name == name) return e.value;
  }
  throw Error(ErrorKind::ConfigError, "unknown ablation variant '" + std::string(name) + "'");
}

const std::vector<Ablation>& all_ablations() {
  static const std::vector<Ablation> list = {
      Ablation::NoClassificationLoss, Ablation::NoReconstructionLoss, Ablation::NoDecoder,
      Ablation::NoAutoencoder,        Ablation::NoBaseGnn,            Ablation::NoDomain,
  };
  return list;
}

void set_config_value(TrainConfig& c, std::string_view key, std::string_view value) {
  auto v = trim(value);
  auto as_int = [&] { return static_cast<int>(to_int(key, v)); };
  if (key == "feature_dim") c.feature_dim = as_int();
  else if (key == "gcn_layers") c.gcn_layers = as_int();
  else if (key == "gcn_hidden") c.gcn_hidden = as_int();
  else if (key == "lstm_layers") c.lstm_layers = as_int();
  else if (key == "lstm_hidden") c.lstm_hidden = as_int();
  else if (key == "char_embedding_dim") c.char_embedding_dim = as_int();
  else if (key == "pool_ratio") c.pool_ratio = to_double(key, v);
  else if (key == "ae_linear_width") c.ae_linear_width = as_int();
  else if (key == "mlp_layers") c.mlp_layers = to_int_list(key, v);
  else if (key == "activation") {
    if (v == "leaky_relu") c.activation = Activation::LeakyRelu;
    else if (v == "relu") c.activation = Activation::Relu;
    else bad(key, "expected leaky_relu or relu");
  } else if (key == "leaky_slope") c.leaky_slope = to_double(key, v);
  else if (key == "root_in_error") c.root_in_error = to_bool(key, v);
  else if (key == "optimizer") {
    if (v == "adam") c.optimizer = OptimizerKind::Adam;
    else if (v == "sgd") c.optimizer = OptimizerKind::Sgd;
    else bad(key, "expected adam or sgd");
  } else if (key == "batch_size") c.batch_size = as_int();
  else if (key == "learning_rate") c.learning_rate = to_double(key, v);
  else if (key == "epochs") c.epochs = as_int();
  else if (key == "patience") c.patience = as_int();
  else if (key == "schedule_t0") c.schedule_t0 = to_double(key, v);
  else if (key == "schedule_mult") c.schedule_mult = to_double(key, v);
  else if (key == "schedule_floor") c.schedule_floor = to_double(key, v);
  else if (key == "seed") {
    long long s = to_int(key, v);
    if (s < 0) bad(key, "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "w2v_epochs") c.w2v_epochs = as_int();
  else if (key == "w2v_negatives") c.w2v_negatives = as_int();
  else if (key == "w2v_learning_rate") c.w2v_learning_rate = to_double(key, v);
  else if (key == "use_domain") c.use_domain = to_bool(key, v);
  else if (key == "ablation") {
    try {
      c.ablation = parse_ablation(v);
    } catch (const Error& e) {
      bad(key, e.what());
    }
  } else if (key == "beta") {
    if (v == "auto") c.beta.reset();
    else c.beta = to_double(key, v);
  } else if (key == "max_nodes") {
    long long n = to_int(key, v);
    if (n < 1) bad(key, "must be at least 1");
    c.max_nodes = static_cast<std::size_t>(n);
  } else if (key == "threads") c.threads = as_int();
  else bad(key, "unknown key");
}

std::vector<std::string> validate_config(const TrainConfig& c) {
  auto require = [](bool ok, std::string_view key, const std::string& why) {
    if (!ok) bad(key, why);
  };
  require(c.feature_dim >= 1, "feature_dim", "must be at least 1");
  require(c.gcn_layers >= 1, "gcn_layers", "must be at least 1");
  require(c.gcn_hidden >= 1, "gcn_hidden", "must be at least 1");
  require(c.lstm_layers >= 1, "lstm_layers", "must be at least 1");
  require(c.lstm_hidden == c.feature_dim, "lstm_hidden", "must equal feature_dim");
  require(c.char_embedding_dim >= 1, "char_embedding_dim", "must be at least 1");
  require(c.pool_ratio > 0 && c.pool_ratio <= 1, "pool_ratio", "must lie in (0, 1]");
  require(c.ae_linear_width == c.feature_dim, "ae_linear_width", "must equal feature_dim");
  require(!c.mlp_layers.empty() && c.mlp_layers.back() == 1, "mlp_layers", "last layer must have width 1");
  for (int w : c.mlp_layers) require(w >= 1, "mlp_layers", "widths must be positive");
  require(c.leaky_slope >= 0 && c.leaky_slope < 1, "leaky_slope", "must lie in [0, 1)");
  require(c.batch_size >= 1, "batch_size", "must be at least 1");
  require(c.learning_rate > 0, "learning_rate", "must be positive");
  require(c.epochs >= 1, "epochs", "must be at least 1");
  require(c.patience >= 1, "patience", "must be at least 1");
  require(c.schedule_t0 > 0, "schedule_t0", "must be positive");
  require(c.schedule_mult >= 1, "schedule_mult", "must be at least 1");
  require(c.schedule_floor >= 0 && c.schedule_floor <= c.learning_rate, "schedule_floor",
          "must lie in [0, learning_rate]");
  require(c.w2v_epochs >= 1, "w2v_epochs", "must be at least 1");
  require(c.w2v_negatives >= 1, "w2v_negatives", "must be at least 1");
  require(c.w2v_learning_rate > 0, "w2v_learning_rate", "must be positive");
  require(!c.beta || *c.beta > 0, "beta", "must be positive");
  require(c.threads >= 1, "threads", "must be at least 1");

  std::vector<std::string> warnings;
  auto advise = [&](bool ok, std::string_view key, std::string_view range) {
    if (!ok) warnings.push_back(std::string(key) + " is outside the tuning range " + std::string(range));
  };
  advise(one_of(c.feature_dim, {16, 32, 64}), "feature_dim", "{16, 32, 64}");
  advise(c.gcn_layers >= 1 && c.gcn_layers <= 6, "gcn_layers", "[1, 6]");
  advise(one_of(c.gcn_hidden, {16, 32, 64, 128}), "gcn_hidden", "{16, 32, 64, 128}");
  advise(c.lstm_layers <= 3, "lstm_layers", "[1, 3]");
  advise(one_of(c.lstm_hidden, {16, 32, 64}), "lstm_hidden", "{16, 32, 64}");
  advise(close_to_any(c.pool_ratio, {0.05, 0.10, 0.15, 0.20, 0.25, 0.30}), "pool_ratio", "{0.05, ..., 0.30}");
  advise(one_of(c.ae_linear_width, {16, 32, 64}), "ae_linear_width", "{16, 32, 64}");
  const std::vector<std::vector<int>> mlps = {{16, 1}, {32, 1}, {16, 8, 1}, {32, 16, 1}};
  advise(std::find(mlps.begin(), mlps.end(), c.mlp_layers) != mlps.end(), "mlp_layers",
         "{16,1 | 32,1 | 16,8,1 | 32,16,1}");
  advise(one_of(c.batch_size, {8, 16, 32, 64}), "batch_size", "{8, 16, 32, 64}");
  advise(close_to_any(c.learning_rate, {1e-2, 1e-3, 1e-4}), "learning_rate", "{1e-2, 1e-3, 1e-4}");
  return warnings;
}

TrainConfig parse_config(std::string_view text, std::vector<std::string>* warnings) {
  TrainConfig c;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
    }
    set_config_value(c, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  auto w = validate_config(c);
  if (warnings) warnings->insert(warnings->end(), w.begin(), w.end());
  return c;
}

TrainConfig load_config(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::string text;
  try {
    text = read_file_bytes(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  return parse_config(text, warnings);
}

std::string to_text(const TrainConfig& c) {
  std::ostringstream out;
  out << "feature_dim = " << c.feature_dim << "\n";
  out << "gcn_layers = " << c.gcn_layers << "\n";
  out << "gcn_hidden = " << c.gcn_hidden << "\n";
  out << "lstm_layers = " << c.lstm_layers << "\n";
  out << "lstm_hidden = " << c.lstm_hidden << "\n";
  out << "char_embedding_dim = " << c.char_embedding_dim << "\n";
  out << "pool_ratio = " << format_double(c.pool_ratio) << "\n";
  out << "ae_linear_width = " << c.ae_linear_width << "\n";
  out << "mlp_layers = ";
  for (std::size_t i = 0; i < c.mlp_layers.size(); ++i) out << (i ? "," : "") << c.mlp_layers[i];
  out << "\n";
  out << "activation = " << (c.activation == Activation::LeakyRelu ? "leaky_relu" : "relu") << "\n";
  out << "leaky_slope = " << format_double(c.leaky_slope) << "\n";
  out << "root_in_error = " << (c.root_in_error ? "true" : "false") << "\n";
  out << "optimizer = " << (c.optimizer == OptimizerKind::Adam ? "adam" : "sgd") << "\n";
  out << "batch_size = " << c.batch_size << "\n";
  out << "learning_rate = " << format_double(c.learning_rate) << "\n";
  out << "epochs = " << c.epochs << "\n";
  out << "patience = " << c.patience << "\n";
  out << "schedule_t0 = " << format_double(c.schedule_t0) << "\n";
  out << "schedule_mult = " << format_double(c.schedule_mult) << "\n";
  out << "schedule_floor = " << format_double(c.schedule_floor) << "\n";
  out << "seed = " << c.seed << "\n";
  out << "w2v_epochs = " << c.w2v_epochs << "\n";
  out << "w2v_negatives = " << c.w2v_negatives << "\n";
  out << "w2v_learning_rate = " << format_double(c.w2v_learning_rate) << "\n";
  out << "use_domain = " << (c.use_domain ? "true" : "false") << "\n";
  out << "ablation = " << to_string(c.ablation) << "\n";
  out << "beta = " << (c.beta ? format_double(*c.beta) : std::string("auto")) << "\n";
  out << "max_nodes = " << c.max_nodes << "\n";
  out << "threads = " << c.threads << "\n";
  return out.str();
}

}  // namespace specnet
