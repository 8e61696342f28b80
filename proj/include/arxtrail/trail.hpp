#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "arxtrail/word.hpp"

namespace arxtrail {

struct TrailRow {
  int round = 0;
  std::map<std::string, u64> words;     // e.g. l, k, x, y or v0..v3
  std::map<std::string, double> values; // weights and other numeric columns as printed
  bool has(const std::string& f) const { return words.count(f) != 0; }
  u64 at(const std::string& f) const;
};

struct Trail {
  std::string cipher;
  unsigned word_size = 0;
  unsigned rounds = 0;
  std::vector<TrailRow> rows;     // rows 0..rounds
  std::vector<u64> weak_key;      // optional
  nlohmann::json claimed;         // free-form reference values
  std::string source;             // file name, when loaded from disk

  const TrailRow& row(unsigned r) const;
};

Trail trail_from_json(const nlohmann::json& j);
nlohmann::json trail_to_json(const Trail& t);
Trail load_trail(const std::string& path);

}  // namespace arxtrail
