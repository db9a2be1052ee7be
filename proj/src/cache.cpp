#include <fstream>
#include <sstream>
#include <system_error>

#include "selfnorm/cli.hpp"
#include "selfnorm/digest.hpp"
#include "selfnorm/errors.hpp"

namespace selfnorm {

namespace {

constexpr std::string_view kMagic = "selfnorm-power/1";

}  // namespace

FileCache::FileCache(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::filesystem::create_directories(directory_);
}

std::string FileCache::key(const AlgebraElement& base, unsigned m) {
  return sha256_hex(base.context().spec() + "\n" + serialize(base) + "\n" + std::to_string(m));
}

std::filesystem::path FileCache::path_for(const std::string& key) const { return directory_ / (key + ".pow"); }

FileCache::Lookup FileCache::fetch(const std::string& key, const GroupContext& ctx) {
  Lookup result;
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) {
    ++misses_;
    return result;
  }
  std::string magic, spec, checksum, payload;
  std::getline(in, magic);
  std::getline(in, spec);
  std::getline(in, checksum);
  std::getline(in, payload);
  const bool framed = in && magic == kMagic && spec == ctx.spec() && checksum == sha256_hex(payload);
  if (framed) {
    try {
      AlgebraElement element = parse_element(payload, ctx);
      if (serialize(element) == payload) {
        ++hits_;
        result.status = Status::Hit;
        result.element = std::move(element);
        return result;
      }
    } catch (const ParseError&) {
    }
  }
  ++corrupt_;
  result.status = Status::Corrupt;
  return result;
}

void FileCache::store(const std::string& key, const AlgebraElement& value) {
  const std::string payload = serialize(value);
  const auto target = path_for(key);
  auto temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << kMagic << "\n" << value.context().spec() << "\n" << sha256_hex(payload) << "\n" << payload << "\n";
    if (!out) throw Error("cannot write cache entry " + temp.string());
  }
  std::filesystem::rename(temp, target);
}

std::optional<AlgebraElement> FileCache::load(const AlgebraElement& base, unsigned m) {
  auto lookup = fetch(key(base, m), base.context());
  return std::move(lookup.element);
}

void FileCache::save(const AlgebraElement& base, unsigned m, const AlgebraElement& value) { store(key(base, m), value); }

AlgebraElement cache_roundtrip(FileCache& cache, const std::string& key, const GroupContext& ctx,
                               const std::function<AlgebraElement()>& compute) {
  auto lookup = cache.fetch(key, ctx);
  if (lookup.element) return std::move(*lookup.element);
  AlgebraElement value = compute();
  cache.store(key, value);
  return value;
}

}  // namespace selfnorm
