#pragma once

// Orchestration layer shared by the command-line tool and the Python module:
// element parsing, the on-disk power cache, JSON reports and command dispatch.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "selfnorm/algebra.hpp"
#include "selfnorm/norms.hpp"
#include "selfnorm/selfless.hpp"
#include "selfnorm/treegeo.hpp"

namespace selfnorm {

using Json = nlohmann::ordered_json;

/// Element grammar: terms joined by `+` or `-`, each `[coef*]word` or a bare
/// coefficient (meaning coef·e). Coefficients are integers or `p/q` with an
/// optional sign; words follow GroupContext::parse_word. `0` is the zero
/// element. Errors carry the byte offset into `text`.
AlgebraElement parse_element(std::string_view text, const GroupContext& ctx);

struct RunConfig {
  std::string group;
  std::uint64_t budget = 20'000'000;  ///< max terms of any intermediate
  unsigned m_max = 4;
  unsigned precision_bits = 64;
  unsigned threads = 1;
  std::string cache_dir;              ///< empty disables the cache
  bool timing = false;

  /// Throws HypothesisViolation on a zero budget, non power-of-two m_max,
  /// zero threads or zero precision.
  void validate() const;
};

/// Content-addressed, checksummed store of convolution powers.
/// Key = sha256(group spec, canonical base, m). Entries that fail the
/// checksum or do not re-serialize canonically are treated as misses.
class FileCache : public PowerStore {
 public:
  enum class Status { Hit, Miss, Corrupt };
  struct Lookup {
    Status status = Status::Miss;
    std::optional<AlgebraElement> element;
  };

  explicit FileCache(std::filesystem::path directory);

  static std::string key(const AlgebraElement& base, unsigned m);
  std::filesystem::path path_for(const std::string& key) const;

  Lookup fetch(const std::string& key, const GroupContext& ctx);
  void store(const std::string& key, const AlgebraElement& value);

  std::optional<AlgebraElement> load(const AlgebraElement& base, unsigned m) override;
  void save(const AlgebraElement& base, unsigned m, const AlgebraElement& value) override;

  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }
  std::uint64_t corrupt() const { return corrupt_; }

 private:
  std::filesystem::path directory_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
  std::uint64_t corrupt_ = 0;
};

/// Loads `key` from the cache, or computes it with `compute`, stores it and
/// returns it. A corrupt entry is recomputed and overwritten.
AlgebraElement cache_roundtrip(FileCache& cache, const std::string& key, const GroupContext& ctx,
                               const std::function<AlgebraElement()>& compute);

// JSON encodings of exact data. Rationals are {"num","den"} decimal strings.
Json to_json(const Rational& q);
Json to_json(const mpz_class& z);
Json to_json(const DyadicBound& b);
Json to_json(const RadicalBound& r);
Json to_json(const HaagerupBound& h);
Json to_json(const NormCertificate& c);
Json to_json(const CascadeReport& c);

struct Report {
  static constexpr int kSchemaVersion = 1;
  std::string command;
  Json inputs = Json::object();
  Json outputs = Json::object();
  bool truncated = false;
  /// Run metadata outside the hashed body (wall time, threads, cache counters).
  std::optional<Json> timing;

  /// The deterministic body plus its sha256 as `body_hash`.
  Json body() const;
  std::string body_hash() const;
  Json to_json() const;
  /// Flattened `path,value` rows of the full report.
  std::string to_csv() const;
};

using Arguments = std::map<std::string, std::string>;

/// Dispatches `command`/`action` with string arguments. Commands: norm,
/// selfless (injectivity, fibers, growth, transfer, product), tree (length,
/// stable, project, cascade, path, search), ball.
Report run_command(const std::string& command, const std::string& action, const Arguments& args,
                   const RunConfig& config);

/// Process exit status for an exception: 2 hypothesis, 3 budget, 4 parse, 1 other.
int exit_code_for(const std::exception& e);
Json error_object(const std::exception& e);

}  // namespace selfnorm
