#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "differential.hpp"
#include "errors.hpp"
#include "oracle.hpp"
#include "qdimacs.hpp"

namespace qrl {

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

/// Bank key: first 16 hex digits of the SHA-256 of the canonical QDIMACS text.
inline std::string formula_hash(Formula const& f) { return sha256_hex(write_qdimacs(f)).substr(0, 16); }

struct CounterexampleMeta {
  std::uint64_t seed = 0;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  bool paper_verdict = false;
  std::optional<bool> oracle_verdict;
  std::vector<std::string> violated_invariants;
  std::optional<std::string> shrunk_from;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["params"] = params;
    j["paper_verdict"] = paper_verdict ? "TRUE" : "FALSE";
    j["oracle_verdict"] = oracle_verdict ? (*oracle_verdict ? "TRUE" : "FALSE") : "REFUSED";
    j["violated_invariants"] = violated_invariants;
    if (shrunk_from) j["shrunk_from"] = *shrunk_from;
    else j["shrunk_from"] = nullptr;
    return j;
  }

  static CounterexampleMeta from_json(nlohmann::ordered_json const& j) {
    CounterexampleMeta m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.params = j.at("params");
    m.paper_verdict = j.at("paper_verdict").get<std::string>() == "TRUE";
    auto const ov = j.at("oracle_verdict").get<std::string>();
    if (ov != "REFUSED") m.oracle_verdict = ov == "TRUE";
    m.violated_invariants = j.at("violated_invariants").get<std::vector<std::string>>();
    if (j.contains("shrunk_from") && !j.at("shrunk_from").is_null())
      m.shrunk_from = j.at("shrunk_from").get<std::string>();
    return m;
  }
};

inline std::string read_file(std::filesystem::path const& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Write via a temporary file and rename, so readers never see partial files.
inline void write_file_atomic(std::filesystem::path const& p, std::string_view content) {
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

/// Directory of <hash>.qdimacs + <hash>.json pairs. Entries are never
/// rewritten or deleted.
class CounterexampleBank {
public:
  explicit CounterexampleBank(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  std::filesystem::path const& dir() const { return dir_; }

  struct Entry {
    std::string hash;
    std::filesystem::path qdimacs;
    std::filesystem::path meta;
  };

  /// Returns the hash; an existing entry with the same hash is kept as is.
  std::string persist(Formula const& f, CounterexampleMeta const& meta) const {
    auto const text = write_qdimacs(f);
    auto const hash = sha256_hex(text).substr(0, 16);
    auto const q = dir_ / (hash + ".qdimacs");
    if (std::filesystem::exists(q)) return hash;
    write_file_atomic(dir_ / (hash + ".json"), meta.to_json().dump(2) + "\n");
    write_file_atomic(q, text);
    return hash;
  }

  std::vector<Entry> entries() const {
    std::vector<Entry> out;
    for (auto const& de : std::filesystem::directory_iterator(dir_)) {
      auto const& p = de.path();
      if (p.extension() != ".qdimacs") continue;
      auto meta = p;
      meta.replace_extension(".json");
      out.push_back({p.stem().string(), p, meta});
    }
    std::sort(out.begin(), out.end(), [](Entry const& a, Entry const& b) { return a.hash < b.hash; });
    return out;
  }

private:
  std::filesystem::path dir_;
};

struct BankCheck {
  std::string hash;
  bool retriggered = false;         // every recorded invariant still fails
  bool oracles_confirm = false;     // both oracles reproduce the recorded verdict
  std::vector<std::string> missing; // recorded invariants that no longer fail
  std::string error;

  bool ok() const { return error.empty() && retriggered && oracles_confirm; }
};

/// Re-run a banked counterexample from its files.
inline BankCheck validate_bank_entry(std::filesystem::path const& qdimacs_path, OracleLimits const& limits = {}) {
  BankCheck check;
  check.hash = qdimacs_path.stem().string();
  try {
    auto const f = parse_qdimacs_or_throw(read_file(qdimacs_path));
    auto meta_path = qdimacs_path;
    meta_path.replace_extension(".json");
    auto const meta = CounterexampleMeta::from_json(nlohmann::ordered_json::parse(read_file(meta_path)));

    check.retriggered = !meta.violated_invariants.empty();
    for (auto const& name : meta.violated_invariants) {
      auto const kind = parse_finding(name);
      if (!kind || !has_finding(f, *kind, limits)) {
        check.retriggered = false;
        check.missing.push_back(name);
      }
    }
    if (meta.oracle_verdict) {
      bool const rec = eval_recursive(f, limits).value;
      bool const elim = eval_elimination(f, limits).value;
      check.oracles_confirm = rec == *meta.oracle_verdict && elim == *meta.oracle_verdict;
    }
  } catch (std::exception const& e) {
    check.error = e.what();
  }
  return check;
}

} // namespace qrl
