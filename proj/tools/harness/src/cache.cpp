#include <openssl/evp.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "inls/error.hpp"
#include "inls/harness.hpp"

namespace inls::harness {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Serializes solves of the same key inside one process; across processes the
// rename keeps readers from seeing partial files.
std::mutex& key_mutex(const std::string& key) {
  static std::mutex guard;
  static std::unordered_map<std::string, std::unique_ptr<std::mutex>> locks;
  std::lock_guard<std::mutex> lock(guard);
  auto& m = locks[key];
  if (!m) m = std::make_unique<std::mutex>();
  return *m;
}

std::shared_ptr<const RadialGrid> grid_for(const Params& p, const GridConfig& grid) {
  return std::make_shared<const RadialGrid>(build_grid(p, grid.N, grid.R_max, grid.mapping));
}

}  // namespace

std::string sha1_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha1(), nullptr) != 1)
    throw Error(ErrorCode::IoError, "SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string git_blob_hash(const std::string& bytes) {
  std::string blob = "blob " + std::to_string(bytes.size());
  blob.push_back('\0');
  return sha1_hex(blob + bytes);
}

std::string GroundStateCache::key(const Params& p, const GridConfig& grid) {
  std::ostringstream k;
  k << "d=" << p.d << " b=" << fmt17(p.b) << " sigma=" << fmt17(p.sigma) << " c=" << fmt17(p.c) << " N=" << grid.N
    << " R_max=" << fmt17(grid.R_max) << " mapping=" << grid.mapping.describe();
  return k.str();
}

fs::path GroundStateCache::path_for(const Params& p, const GridConfig& grid) const {
  return dir_ / ("gs-" + sha1_hex(key(p, grid)) + ".txt");
}

std::optional<GroundStateBundle> GroundStateCache::load(const Params& p, const GridConfig& grid) const {
  std::ifstream f(path_for(p, grid));
  if (!f) return std::nullopt;
  // Anything unreadable counts as a miss and is re-solved over.
  std::string line, seed;
  int iterations = 0, newton = 0;
  std::size_t n = 0;
  std::getline(f, line);
  if (line != "# inls ground state") return std::nullopt;
  std::getline(f, line);
  if (line != "key " + key(p, grid)) return std::nullopt;  // hash collision or stale format
  auto field = [&](const char* name) {
    std::getline(f, line);
    const std::string prefix = std::string(name) + " ";
    if (line.rfind(prefix, 0) != 0) throw std::invalid_argument("corrupt header");
    return line.substr(prefix.size());
  };
  try {
    seed = field("seed");
    iterations = std::stoi(field("iterations"));
    newton = std::stoi(field("newton_iterations"));
    n = std::stoul(field("n"));
  } catch (const std::logic_error&) {
    return std::nullopt;
  }
  if (n != grid.N) return std::nullopt;
  Profile Q(n);
  for (auto& q : Q) {
    if (!std::getline(f, line)) return std::nullopt;
    char* end = nullptr;
    q = std::strtod(line.c_str(), &end);
    if (end == line.c_str()) return std::nullopt;
  }
  return bundle_from_profile(p, grid_for(p, grid), std::move(Q), seed, iterations, newton);
}

void GroundStateCache::store(const GroundStateBundle& gs, const GridConfig& grid) const {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create cache directory " + dir_.string() + ": " + ec.message());
  std::ostringstream out;
  out << "# inls ground state\n"
      << "key " << key(gs.params, grid) << "\n"
      << "seed " << gs.seed << "\n"
      << "iterations " << gs.iterations << "\n"
      << "newton_iterations " << gs.newton_iterations << "\n"
      << "n " << gs.Q.size() << "\n";
  for (double q : gs.Q) out << fmt17(q) << "\n";

  static std::atomic<unsigned> counter{0};
  const fs::path target = path_for(gs.params, grid);
  std::ostringstream tmp_name;
  tmp_name << ".tmp-" << target.filename().string() << "-" << std::hash<std::thread::id>{}(std::this_thread::get_id())
           << "-" << counter++;
  const fs::path tmp = dir_ / tmp_name.str();
  write_text(tmp, out.str());
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot install cache file " + target.string());
  }
}

GroundStateBundle GroundStateCache::obtain(const Params& p, const GridConfig& grid, bool require_cached,
                                           bool* hit) const {
  std::lock_guard<std::mutex> lock(key_mutex((dir_ / key(p, grid)).string()));
  if (auto gs = load(p, grid)) {
    if (hit) *hit = true;
    return std::move(*gs);
  }
  if (require_cached) throw Error(ErrorCode::CacheMiss, "no cached ground state for " + key(p, grid));
  if (hit) *hit = false;
  const GroundStateBundle solved = solve_ground_state(p, grid_for(p, grid));
  store(solved, grid);
  // Return what a later cache hit would see, so first run and rerun agree bit for bit.
  auto reloaded = load(p, grid);
  if (!reloaded) throw Error(ErrorCode::IoError, "cache file unreadable after write");
  return std::move(*reloaded);
}

fs::path resolve_cache_dir(const ExperimentConfig& cfg, const std::optional<fs::path>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("INLS_CACHE_DIR"); env && *env) return env;
  return cfg.cache.dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  f << text;
  f.close();
  if (!f) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace inls::harness
