#include "specnet/manifest.hpp"

#include <iterator>

#include "json.hpp"
#include "specnet/dom.hpp"

namespace specnet {

std::string read_file_bytes(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw Error(ErrorKind::FileMissing, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::IoFailure, "cannot read " + path.string());
  return bytes;
}

ManifestReader::ManifestReader(const std::filesystem::path& path)
    : in_(path), base_dir_(path.parent_path()) {
  if (!in_) throw Error(ErrorKind::IoFailure, "cannot open manifest " + path.string());
}

std::optional<ManifestReader::Item> ManifestReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    auto reject = [&](const std::string& why) {
      ++skipped_;
      warnings_.push_back("line " + std::to_string(line_no_) + ": " + why);
    };

    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      reject("not a JSON object");
      continue;
    }
    auto path_it = record.find("html_path");
    if (path_it == record.end() || !path_it->is_string() || path_it->get<std::string>().empty()) {
      reject("missing html_path");
      continue;
    }
    std::optional<std::string> domain;
    if (auto it = record.find("domain"); it != record.end() && !it->is_null()) {
      if (!it->is_string()) {
        reject("domain must be a string or null");
        continue;
      }
      std::string d = it->get<std::string>();
      if (!normalize_domain(d).empty()) domain = std::move(d);
    }
    std::optional<int> label;
    if (auto it = record.find("label"); it != record.end() && !it->is_null()) {
      if (!it->is_number_integer() || (it->get<int>() != 0 && it->get<int>() != 1)) {
        reject("label must be 0, 1 or null");
        continue;
      }
      label = it->get<int>();
    }

    Item item;
    item.line = line_no_;
    item.html_path = path_it->get<std::string>();
    std::filesystem::path html_path(item.html_path);
    if (html_path.is_relative()) html_path = base_dir_ / html_path;
    try {
      RawPage page;
      page.html = read_file_bytes(html_path);
      page.domain = std::move(domain);
      page.label = label;
      page.source = item.html_path;
      item.page = std::move(page);
    } catch (const Error& e) {
      item.error = e.kind();
      item.message = e.what();
    }
    return item;
  }
  return std::nullopt;
}

LoadedPages load_manifest(const std::filesystem::path& path) {
  ManifestReader reader(path);
  LoadedPages out;
  while (auto item = reader.next()) {
    if (item->page) {
      out.pages.push_back(std::move(*item->page));
    } else {
      out.errors.push_back(path.string() + ":" + std::to_string(item->line) + ": " + item->message);
    }
  }
  out.skipped = reader.skipped();
  for (const auto& w : reader.warnings()) out.errors.push_back(path.string() + ": " + w);
  return out;
}

void write_manifest_line(std::ostream& out, const std::string& html_path,
                         const std::optional<std::string>& domain, std::optional<int> label) {
  nlohmann::json record;
  record["html_path"] = html_path;
  record["domain"] = domain ? nlohmann::json(*domain) : nlohmann::json(nullptr);
  record["label"] = label ? nlohmann::json(*label) : nlohmann::json(nullptr);
  out << record.dump() << '\n';
}

}  // namespace specnet
