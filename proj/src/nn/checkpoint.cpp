// SPDX-License-Identifier: Apache-2.0
#include "thzmesh/nn/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace thzmesh::nn {

namespace {

constexpr const char* kMagic = "thzmesh-checkpoint";
constexpr int kVersion = 1;

}  // namespace

void save_checkpoint(
    const std::string& path,
    const std::vector<std::pair<std::string, const ParamSet*>>& groups) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  std::size_t count = 0;
  for (const auto& [name, set] : groups) count += set->entries().size();
  out << kMagic << ' ' << kVersion << '\n' << count << '\n';
  char buf[64];
  for (const auto& [group, set] : groups) {
    for (const auto& [name, t] : set->entries()) {
      out << group << '/' << name << ' ' << t.rows << ' ' << t.cols << '\n';
      for (int i = 0; i < t.numel(); ++i) {
        std::snprintf(buf, sizeof(buf), "%a", t.data[static_cast<std::size_t>(i)]);
        out << buf << (i + 1 == t.numel() ? '\n' : ' ');
      }
    }
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

void load_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, ParamSet*>>& groups) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot read " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != kMagic || version != kVersion)
    throw std::runtime_error("checkpoint: unrecognised header in " + path);
  std::size_t count = 0;
  in >> count;

  std::size_t expected = 0;
  for (const auto& [name, set] : groups) expected += set->entries().size();
  if (count != expected)
    throw std::runtime_error("checkpoint: tensor count mismatch in " + path);

  for (std::size_t k = 0; k < count; ++k) {
    std::string full;
    int rows = 0, cols = 0;
    if (!(in >> full >> rows >> cols))
      throw std::runtime_error("checkpoint: truncated header in " + path);
    const auto slash = full.find('/');
    if (slash == std::string::npos)
      throw std::runtime_error("checkpoint: malformed tensor name " + full);
    const std::string group = full.substr(0, slash);
    const std::string name = full.substr(slash + 1);

    ParamSet* set = nullptr;
    for (const auto& [gname, gset] : groups) {
      if (gname == group) {
        set = gset;
        break;
      }
    }
    if (set == nullptr || !set->has(name))
      throw std::runtime_error("checkpoint: unknown tensor " + full);
    Tensor& t = set->get(name);
    if (t.rows != rows || t.cols != cols)
      throw std::runtime_error("checkpoint: shape mismatch for " + full);
    for (int i = 0; i < t.numel(); ++i) {
      std::string tok;
      if (!(in >> tok))
        throw std::runtime_error("checkpoint: truncated data for " + full);
      t.data[static_cast<std::size_t>(i)] = std::strtod(tok.c_str(), nullptr);
    }
  }
}

}  // namespace thzmesh::nn
