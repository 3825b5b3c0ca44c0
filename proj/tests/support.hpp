#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "specnet/dom.hpp"
#include "specnet/model/backbone.hpp"
#include "specnet/nn/tape.hpp"
#include "specnet/rng.hpp"

namespace specnet::testing {

/// Random rooted tree, parents before children. `fanout_bias` near 1 gives
/// deep chains, near 0 bushy trees.
inline ParentArray random_parent(std::size_t n, Rng& rng, double fanout_bias = 0.5) {
  ParentArray parent(n, kNoParent);
  for (std::size_t v = 1; v < n; ++v) parent[v] = rng.chance(fanout_bias) ? v - 1 : rng.index(v);
  return parent;
}

template <class T = double>
nn::Matrix<T> random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale = 1.0) {
  nn::Matrix<T> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(rng.uniform(-scale, scale));
  return m;
}

/// Nearest kept ancestor by walking parent links one step at a time.
inline ParentArray ancestor_walk(const ParentArray& parent, const std::vector<std::size_t>& kept) {
  ParentArray out(kept.size(), kNoParent);
  for (std::size_t i = 1; i < kept.size(); ++i) {
    std::size_t v = parent[kept[i]];
    while (std::find(kept.begin(), kept.end(), v) == kept.end()) v = parent[v];
    out[i] = static_cast<std::size_t>(std::find(kept.begin(), kept.end(), v) - kept.begin());
  }
  return out;
}

/// Compact rendering of the tag structure, e.g. html(body(div(p))).
inline void tag_shape(const DomTree& t, std::size_t i, std::string& out) {
  out += t.node(i).token;
  bool open = false;
  for (auto c : t.children(i)) {
    if (t.node(c).kind != NodeKind::Tag) continue;
    out += open ? "," : "(";
    open = true;
    tag_shape(t, c, out);
  }
  if (open) out += ")";
}

inline std::string tag_shape(const DomTree& t) {
  std::string out;
  if (!t.empty()) tag_shape(t, 0, out);
  return out;
}

class TempDir {
 public:
  explicit TempDir(const std::string& stem) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            (stem + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

/// Runs the CLI with `args` (already shell-quoted where needed).
inline CliRun run_cli(const std::string& args, const std::string& env = "") {
  static int counter = 0;
  const auto base = std::filesystem::temp_directory_path() /
                    ("specnet-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  const std::string out = base.string() + ".out", err = base.string() + ".err";
  const std::string command = env + (env.empty() ? "" : " ") + SPECNET_CLI + std::string(" ") + args + " >" + out +
                              " 2>" + err;
  const int status = std::system(command.c_str());
  CliRun run;
  run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  run.out = slurp(out);
  run.err = slurp(err);
  std::filesystem::remove(out);
  std::filesystem::remove(err);
  return run;
}

inline std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace specnet::testing
