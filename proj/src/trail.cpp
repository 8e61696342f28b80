#include "arxtrail/trail.hpp"

#include <fstream>
#include <sstream>

namespace arxtrail {

u64 TrailRow::at(const std::string& f) const {
  auto it = words.find(f);
  if (it == words.end()) throw Error(ErrorCode::Parse, "trail row " + std::to_string(round) + " has no '" + f + "'");
  return it->second;
}

const TrailRow& Trail::row(unsigned r) const {
  if (r >= rows.size()) throw Error(ErrorCode::Parse, "trail has no row " + std::to_string(r));
  return rows[r];
}

namespace {
std::string bin_or_hex(u64 v, unsigned n, bool bin) { return bin ? format_bin(v, n) : format_hex(v, n); }
}  // namespace

Trail trail_from_json(const nlohmann::json& j) {
  try {
    Trail t;
    const std::string fmt = j.value("format", "");
    if (fmt != "arxtrail/1") throw Error(ErrorCode::Parse, "unsupported trail format '" + fmt + "'");
    t.cipher = j.at("cipher").get<std::string>();
    t.word_size = j.at("word_size").get<unsigned>();
    check_width(t.word_size);
    t.rounds = j.at("rounds").get<unsigned>();
    for (const auto& jr : j.at("rows")) {
      TrailRow r;
      r.round = jr.at("round").get<int>();
      for (auto it = jr.begin(); it != jr.end(); ++it) {
        if (it.key() == "round") continue;
        if (it->is_string())
          r.words[it.key()] = parse_word(it->get<std::string>(), t.word_size);
        else if (it->is_number())
          r.values[it.key()] = it->get<double>();
      }
      if (r.round != static_cast<int>(t.rows.size())) throw Error(ErrorCode::Parse, "trail rows must be numbered 0, 1, 2, ...");
      t.rows.push_back(std::move(r));
    }
    if (t.rows.size() != t.rounds + 1)
      throw Error(ErrorCode::Parse, "trail of " + std::to_string(t.rounds) + " rounds needs " + std::to_string(t.rounds + 1) + " rows");
    if (j.contains("weak_key"))
      for (const auto& w : j.at("weak_key")) t.weak_key.push_back(parse_word(w.get<std::string>(), t.word_size));
    if (j.contains("claimed")) t.claimed = j.at("claimed");
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed trail JSON: ") + e.what());
  }
}

nlohmann::json trail_to_json(const Trail& t) {
  nlohmann::json j;
  j["format"] = "arxtrail/1";
  j["cipher"] = t.cipher;
  j["word_size"] = t.word_size;
  j["rounds"] = t.rounds;
  const bool bin = t.word_size <= 16 && t.cipher.rfind("toy", 0) == 0;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    nlohmann::json jr;
    jr["round"] = r.round;
    for (const auto& [k, v] : r.words) jr[k] = bin_or_hex(v, t.word_size, bin);
    for (const auto& [k, v] : r.values) {
      if (v == static_cast<double>(static_cast<long long>(v)))
        jr[k] = static_cast<long long>(v);
      else
        jr[k] = v;
    }
    rows.push_back(jr);
  }
  j["rows"] = rows;
  if (!t.weak_key.empty()) {
    nlohmann::json wk = nlohmann::json::array();
    for (u64 w : t.weak_key) wk.push_back(format_hex(w, t.word_size));
    j["weak_key"] = wk;
  }
  if (!t.claimed.is_null()) j["claimed"] = t.claimed;
  return j;
}

Trail load_trail(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open trail file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, "trail file '" + path + "' is not valid JSON: " + e.what());
  }
  Trail t = trail_from_json(j);
  t.source = path;
  return t;
}

}  // namespace arxtrail
