#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "duoseg/phantom.hpp"
#include "duoseg/rng.hpp"

namespace duoseg {

namespace fs = std::filesystem;

std::vector<ManifestEntry> DatasetManifest::select(Domain d, const std::string& split) const {
  std::vector<ManifestEntry> out;
  for (const auto& e : entries)
    if (e.domain == d && e.split == split) out.push_back(e);
  return out;
}

std::string DatasetManifest::resolve(const std::string& rel) const {
  if (rel.empty() || rel.front() == '/') return rel;
  if (base_dir.empty()) return rel;
  return (fs::path(base_dir) / rel).string();
}

void write_manifest(const DatasetManifest& m, const std::string& path) {
  // write to a temp file then rename, so a failed run leaves no partial manifest
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp);
    check_data(bool(f), "cannot open for writing: " + tmp);
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx", (unsigned long long)m.config_hash);
    f << "# duoseg dataset manifest\n# config_hash=" << hash << "\n";
    for (const auto& e : m.entries) {
      f << e.volume_path << "\t" << (e.mask_path.empty() ? "-" : e.mask_path) << "\t"
        << domain_name(e.domain) << "\t" << e.split << "\n";
    }
    check_data(bool(f), "write failed: " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  check_data(!ec, "cannot move manifest into place: " + path);
}

DatasetManifest read_manifest(const std::string& path) {
  std::ifstream f(path);
  check_data(bool(f), "cannot open manifest: " + path);
  DatasetManifest m;
  m.base_dir = fs::path(path).parent_path().string();
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto pos = line.find("config_hash=");
      if (pos != std::string::npos)
        m.config_hash = std::stoull(line.substr(pos + 12), nullptr, 16);
      continue;
    }
    std::istringstream ss(line);
    ManifestEntry e;
    std::string mask, dom;
    check_data(bool(ss >> e.volume_path >> mask >> dom >> e.split),
               "malformed manifest line: " + line);
    e.mask_path = mask == "-" ? "" : mask;
    if (dom == "source")
      e.domain = Domain::kSource;
    else if (dom == "target")
      e.domain = Domain::kTarget;
    else
      throw DataError("unknown domain tag in manifest: " + dom);
    check_data(e.split == "train" || e.split == "test", "unknown split tag: " + e.split);
    m.entries.push_back(std::move(e));
  }
  check_data(!m.entries.empty(), "empty manifest: " + path);
  return m;
}

DatasetManifest generate_dataset(const PhantomConfig& cfg, int n_source_train,
                                 int n_target_train, int n_target_test,
                                 const std::string& out_dir) {
  cfg.validate();
  check_config(n_source_train > 0 && n_target_train > 0 && n_target_test > 0,
               "generate_dataset: all split counts must be > 0");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  check_data(fs::is_directory(out_dir), "cannot create output directory: " + out_dir);

  DatasetManifest m;
  m.base_dir = out_dir;
  m.config_hash = cfg.config_hash();

  struct Item {
    Domain domain;
    std::string split;
    const char* stem;
    int count;
    bool mask_in_manifest;
  };
  const Item items[] = {
      {Domain::kSource, "train", "src_train", n_source_train, true},
      {Domain::kTarget, "train", "tar_train", n_target_train, false},
      {Domain::kTarget, "test", "tar_test", n_target_test, true},
  };

  int entry_index = 0;
  for (const auto& it : items) {
    for (int i = 0; i < it.count; ++i, ++entry_index) {
      const uint64_t seed = derive_seed(cfg.seed, "dataset-entry", uint64_t(entry_index));
      auto [vol, mask] = generate_phantom(cfg, it.domain, seed);
      char name[64];
      std::snprintf(name, sizeof(name), "%s_%03d.rvol", it.stem, i);
      char mask_name[64];
      std::snprintf(mask_name, sizeof(mask_name), "%s_%03d_mask.rvol", it.stem, i);
      write_rvol((fs::path(out_dir) / name).string(), vol);
      // target-train masks are stored for oracle evaluation but withheld
      // from the manifest so training code cannot see them
      write_rvol((fs::path(out_dir) / mask_name).string(), mask);
      ManifestEntry e;
      e.volume_path = name;
      e.mask_path = it.mask_in_manifest ? mask_name : "";
      e.domain = it.domain;
      e.split = it.split;
      m.entries.push_back(std::move(e));
    }
  }
  write_manifest(m, (fs::path(out_dir) / "manifest.tsv").string());
  return m;
}

}  // namespace duoseg
