#include "specnet/bundle.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "specnet/error.hpp"
#include "specnet/manifest.hpp"

namespace specnet {

namespace {

constexpr std::string_view kMagic = "SPECNETB\n";

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void append_floats(std::string& out, const nn::Matrix<float>& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(m.data()[i]);
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
  }
}

nn::Matrix<float> read_floats(std::string_view data, Eigen::Index rows, Eigen::Index cols) {
  nn::Matrix<float> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[static_cast<std::size_t>(4 * i + b)])) << (8 * b);
    }
    m.data()[i] = std::bit_cast<float>(bits);
  }
  return m;
}

bool same_bits(const nn::Matrix<float>& a, const nn::Matrix<float>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(float) * static_cast<std::size_t>(a.size())) == 0;
}

[[noreturn]] void corrupt(const std::string& why) { throw Error(ErrorKind::CorruptBundle, why); }

nlohmann::json metadata_json(const TrainingMetadata& m) {
  return {{"seed", m.seed},
          {"epochs_run", m.epochs_run},
          {"best_epoch", m.best_epoch},
          {"validation_macro_f1", m.validation_macro_f1},
          {"validation_accuracy", m.validation_accuracy},
          {"calibration_f1", m.calibration_f1},
          {"embedding_fallback", m.embedding_fallback},
          {"train_pages", m.train_pages},
          {"validation_pages", m.validation_pages}};
}

TrainingMetadata metadata_from(const nlohmann::json& j) {
  TrainingMetadata m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.epochs_run = j.at("epochs_run").get<int>();
  m.best_epoch = j.at("best_epoch").get<int>();
  m.validation_macro_f1 = j.at("validation_macro_f1").get<double>();
  m.validation_accuracy = j.at("validation_accuracy").get<double>();
  m.calibration_f1 = j.at("calibration_f1").get<double>();
  m.embedding_fallback = j.at("embedding_fallback").get<bool>();
  m.train_pages = j.at("train_pages").get<std::size_t>();
  m.validation_pages = j.at("validation_pages").get<std::size_t>();
  return m;
}

}  // namespace

bool identical(const ModelBundle& a, const ModelBundle& b) {
  if (!(a.config == b.config) || !(a.vocabulary == b.vocabulary) || !(a.metadata == b.metadata)) return false;
  if (std::bit_cast<std::uint64_t>(a.tau) != std::bit_cast<std::uint64_t>(b.tau)) return false;
  if (std::bit_cast<std::uint64_t>(a.beta) != std::bit_cast<std::uint64_t>(b.beta)) return false;
  if (!same_bits(a.embeddings, b.embeddings) || a.parameters.size() != b.parameters.size()) return false;
  for (std::size_t i = 0; i < a.parameters.size(); ++i) {
    if (a.parameters[i].name != b.parameters[i].name) return false;
    if (!same_bits(a.parameters[i].value, b.parameters[i].value)) return false;
  }
  return true;
}

std::string serialize_bundle(const ModelBundle& bundle) {
  std::string data;
  nlohmann::json tensors = nlohmann::json::array();
  auto add_tensor = [&](const std::string& name, const nn::Matrix<float>& m) {
    tensors.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"offset", data.size()}});
    append_floats(data, m);
  };
  add_tensor("embeddings", bundle.embeddings);
  for (const auto& p : bundle.parameters) add_tensor(p.name, p.value);

  nlohmann::json header = {
      {"version", ModelBundle::kFormatVersion},
      {"config", to_text(bundle.config)},
      {"metadata", metadata_json(bundle.metadata)},
      {"vocabulary",
       {{"tags", bundle.vocabulary.tags()},
        {"attributes", bundle.vocabulary.attributes()},
        {"standard_list_version", bundle.vocabulary.standard_list_version()}}},
      {"tau", bundle.tau},
      {"beta", bundle.beta},
      {"tensors", tensors},
      {"data_bytes", data.size()},
      {"checksum", fnv1a(data)},
  };
  const std::string text = header.dump();
  std::string out(kMagic);
  out += std::to_string(text.size()) + "\n";
  out += text;
  out += data;
  return out;
}

ModelBundle deserialize_bundle(std::string_view bytes) {
  if (bytes.substr(0, kMagic.size()) != kMagic) corrupt("not a model bundle");
  bytes.remove_prefix(kMagic.size());
  const auto nl = bytes.find('\n');
  if (nl == std::string_view::npos || nl == 0 || nl > 12) corrupt("missing header length");
  std::size_t header_len = 0;
  for (char c : bytes.substr(0, nl)) {
    if (c < '0' || c > '9') corrupt("bad header length");
    header_len = header_len * 10 + static_cast<std::size_t>(c - '0');
  }
  bytes.remove_prefix(nl + 1);
  if (header_len > bytes.size()) corrupt("truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(0, header_len));
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("unreadable header: ") + e.what());
  }
  const std::string_view data = bytes.substr(header_len);
  try {
    const int version = header.at("version").get<int>();
    if (version != ModelBundle::kFormatVersion) {
      throw Error(ErrorKind::UnsupportedVersion, "bundle format version " + std::to_string(version) +
                                                     " (supported: " + std::to_string(ModelBundle::kFormatVersion) + ")");
    }
    const auto data_bytes = header.at("data_bytes").get<std::size_t>();
    if (data.size() != data_bytes) corrupt("tensor data truncated or padded");
    if (fnv1a(data) != header.at("checksum").get<std::uint64_t>()) corrupt("checksum mismatch");

    ModelBundle b;
    try {
      b.config = parse_config(header.at("config").get<std::string>());
    } catch (const Error& e) {
      corrupt(std::string("embedded config: ") + e.what());
    }
    b.metadata = metadata_from(header.at("metadata"));
    const auto& v = header.at("vocabulary");
    b.vocabulary = TokenVocabulary(v.at("tags").get<std::vector<std::string>>(),
                                   v.at("attributes").get<std::vector<std::string>>(),
                                   v.at("standard_list_version").get<std::string>());
    b.tau = header.at("tau").get<double>();
    b.beta = header.at("beta").get<double>();
    bool first = true;
    for (const auto& t : header.at("tensors")) {
      const auto rows = t.at("rows").get<Eigen::Index>();
      const auto cols = t.at("cols").get<Eigen::Index>();
      const auto offset = t.at("offset").get<std::size_t>();
      if (rows < 0 || cols < 0) corrupt("negative tensor shape");
      const auto len = static_cast<std::size_t>(rows * cols) * 4;
      if (offset > data.size() || len > data.size() - offset) corrupt("tensor outside data block");
      auto m = read_floats(data.substr(offset, len), rows, cols);
      if (first) {
        b.embeddings = std::move(m);
        first = false;
      } else {
        b.parameters.add(t.at("name").get<std::string>(), std::move(m));
      }
    }
    if (first) corrupt("no tensors");
    if (static_cast<std::size_t>(b.embeddings.rows()) != b.vocabulary.rows()) {
      corrupt("embedding table does not match vocabulary");
    }
    return b;
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("malformed header: ") + e.what());
  }
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
  const std::string bytes = serialize_bundle(bundle);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  return deserialize_bundle(read_file_bytes(path));
}

}  // namespace specnet
