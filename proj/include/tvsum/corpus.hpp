// Copyright 2026 The tvsum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Message streams, alias tables, mention tagging and one-minute binning.
//
// Message file: JSON Lines, one {"id", "t", "author", "text"} object per line.
// Alias file:   JSON Lines, one {"name", "aliases": [...]} object per line.
//               The compact form "Canonical Name: alias, alias" is also read.

#ifndef TVSUM_CORPUS_HPP_
#define TVSUM_CORPUS_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "tvsum/error.hpp"
#include "tvsum/text.hpp"

namespace tvsum {

using Timestamp = std::int64_t;  // epoch seconds
using CharacterSet = std::set<std::string>;

struct Message {
  std::string id;
  Timestamp t = 0;
  std::string author;
  std::string text;

  friend bool operator==(const Message &, const Message &) = default;
};

struct LineError {
  std::size_t line = 0;
  std::string reason;
};

struct MessageParseResult {
  std::vector<Message> messages;
  std::vector<LineError> malformed;
};

// Parses the message line format. Malformed lines are skipped and reported;
// a duplicate id rejects the whole stream. Messages come back sorted by t
// (stable with respect to file order).
inline MessageParseResult parse_messages(std::string_view stream) {
  MessageParseResult result;
  std::unordered_set<std::string> seen;
  std::size_t lineno = 0;
  for (std::string_view raw : text::split_lines(stream)) {
    ++lineno;
    std::string_view line = text::trim(raw);
    if (line.empty()) continue;
    nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
    auto bad = [&](std::string why) {
      result.malformed.push_back({lineno, std::move(why)});
    };
    if (rec.is_discarded() || !rec.is_object()) {
      bad("not a JSON object");
      continue;
    }
    auto id = rec.find("id");
    auto t = rec.find("t");
    auto txt = rec.find("text");
    if (id == rec.end() || !id->is_string() || id->get<std::string>().empty()) {
      bad("missing or empty string field 'id'");
      continue;
    }
    if (t == rec.end() || !t->is_number_integer()) {
      bad("missing or non-integer timestamp 't'");
      continue;
    }
    if (t->get<std::int64_t>() < 0) {
      bad("negative timestamp 't'");
      continue;
    }
    if (txt == rec.end() || !txt->is_string() ||
        text::trim(txt->get_ref<const std::string &>()).empty()) {
      bad("missing or blank field 'text'");
      continue;
    }
    Message m;
    m.id = id->get<std::string>();
    m.t = t->get<std::int64_t>();
    auto author = rec.find("author");
    if (author != rec.end() && author->is_string()) m.author = *author;
    m.text = txt->get<std::string>();
    if (!seen.insert(m.id).second) {
      throw ParseError("duplicate message id '" + m.id + "'", lineno);
    }
    result.messages.push_back(std::move(m));
  }
  std::stable_sort(result.messages.begin(), result.messages.end(),
                   [](const Message &a, const Message &b) { return a.t < b.t; });
  return result;
}

inline std::string serialize_messages(const std::vector<Message> &msgs) {
  std::string out;
  for (const Message &m : msgs) {
    nlohmann::json rec = {
        {"id", m.id}, {"t", m.t}, {"author", m.author}, {"text", m.text}};
    out += rec.dump();
    out += '\n';
  }
  return out;
}

// Drops retweets whose body repeats an earlier message. A leading
// "RT @handle:" prefix is ignored when comparing bodies.
inline std::vector<Message> collapse_retweets(const std::vector<Message> &msgs) {
  auto body = [](std::string_view s) {
    s = text::trim(s);
    if (s.substr(0, 3) == "RT ") {
      std::size_t colon = s.find(':');
      if (colon != std::string_view::npos) s = text::trim(s.substr(colon + 1));
    }
    return text::join(text::tokenize(s, false), " ");
  };
  std::unordered_set<std::string> seen;
  std::vector<Message> out;
  for (const Message &m : msgs) {
    if (seen.insert(body(m.text)).second) out.push_back(m);
  }
  return out;
}

// Canonical name -> aliases. Aliases are matched case-insensitively as whole
// token sequences; one alias may belong to only one canonical name.
class AliasTable {
 public:
  struct Alias {
    std::string canonical;
    std::vector<std::string> tokens;
  };

  // Adds aliases for name. Throws ValidationError on a collision with another
  // canonical name or on an empty alias.
  void add(const std::string &name, const std::vector<std::string> &aliases) {
    if (text::trim(name).empty()) throw ValidationError("empty canonical name");
    auto &set = entries_[name];
    for (const std::string &raw : aliases) {
      std::string a(text::trim(raw));
      std::vector<std::string> toks = text::tokenize(a, false);
      if (toks.empty()) {
        throw ValidationError("empty alias for '" + name + "'");
      }
      std::string key = text::join(toks, " ");
      auto it = owner_.find(key);
      if (it != owner_.end() && it->second != name) {
        throw ValidationError("alias '" + a + "' maps to both '" + it->second +
                              "' and '" + name + "'");
      }
      if (it == owner_.end()) {
        owner_.emplace(key, name);
        index_.push_back({name, std::move(toks)});
      }
      set.insert(a);
    }
    if (set.empty()) throw ValidationError("no aliases for '" + name + "'");
  }

  const std::map<std::string, std::set<std::string>> &entries() const {
    return entries_;
  }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto &[name, _] : entries_) out.push_back(name);
    return out;
  }
  bool contains(const std::string &name) const {
    return entries_.count(name) > 0;
  }
  // Canonical name for a canonical name or any alias (case-insensitive).
  std::optional<std::string> resolve(std::string_view name_or_alias) const {
    std::string key(text::trim(name_or_alias));
    if (entries_.count(key)) return key;
    for (const auto &[name, _] : entries_) {
      if (text::to_lower(name) == text::to_lower(key)) return name;
    }
    auto it = owner_.find(text::join(text::tokenize(key, false), " "));
    if (it != owner_.end()) return it->second;
    return std::nullopt;
  }
  const std::vector<Alias> &aliases() const { return index_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::map<std::string, std::set<std::string>> entries_;
  std::unordered_map<std::string, std::string> owner_;  // token key -> name
  std::vector<Alias> index_;
};

inline AliasTable parse_alias_table(std::string_view source) {
  AliasTable table;
  std::size_t lineno = 0;
  for (std::string_view raw : text::split_lines(source)) {
    ++lineno;
    std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::string name;
    std::vector<std::string> aliases;
    if (line.front() == '{') {
      nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
      if (rec.is_discarded() || !rec.contains("name") ||
          !rec["name"].is_string() || !rec.contains("aliases") ||
          !rec["aliases"].is_array()) {
        throw ParseError("alias record needs 'name' and 'aliases'", lineno);
      }
      name = rec["name"].get<std::string>();
      for (const auto &a : rec["aliases"]) {
        if (!a.is_string()) throw ParseError("alias must be a string", lineno);
        aliases.push_back(a.get<std::string>());
      }
    } else {
      std::size_t colon = line.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("expected 'Name: alias, alias'", lineno);
      }
      name = std::string(text::trim(line.substr(0, colon)));
      std::string_view rest = line.substr(colon + 1);
      while (!rest.empty()) {
        std::size_t comma = rest.find(',');
        aliases.emplace_back(text::trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
    }
    try {
      table.add(name, aliases);
    } catch (const ValidationError &e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return table;
}

inline std::string serialize_alias_table(const AliasTable &table) {
  std::string out;
  for (const auto &[name, aliases] : table.entries()) {
    nlohmann::json rec = {{"name", name}, {"aliases", aliases}};
    out += rec.dump();
    out += '\n';
  }
  return out;
}

// Canonical names whose alias occurs as a whole token sequence in the text.
// Handles ("@name") are never matched and the author field is not consulted.
// A trailing possessive "'s" on a token is ignored.
inline CharacterSet tag_mentions(std::string_view message_text,
                                 const AliasTable &aliases) {
  std::vector<std::string> toks = text::tokenize(message_text);
  for (std::string &tok : toks) {
    if (tok.size() > 2 && tok.ends_with("'s")) tok.resize(tok.size() - 2);
  }
  CharacterSet found;
  for (const AliasTable::Alias &a : aliases.aliases()) {
    if (found.count(a.canonical) || a.tokens.size() > toks.size()) continue;
    for (std::size_t i = 0; i + a.tokens.size() <= toks.size(); ++i) {
      if (std::equal(a.tokens.begin(), a.tokens.end(), toks.begin() + i)) {
        found.insert(a.canonical);
        break;
      }
    }
  }
  return found;
}

inline CharacterSet tag_mentions(const Message &m, const AliasTable &aliases) {
  return tag_mentions(m.text, aliases);
}

struct MinuteBin {
  std::int64_t minute_index = 0;
  Timestamp start_t = 0;
  std::vector<std::string> message_ids;
  std::map<std::string, std::size_t> mention_count;
  std::map<std::string, double> mention_fraction;

  std::size_t size() const { return message_ids.size(); }
};

struct BinningOptions {
  // Bin origin; defaults to the first message's timestamp.
  std::optional<Timestamp> event_start;
};

// Groups time-ordered messages into consecutive one-minute bins starting at
// the origin. Gaps produce empty bins. Messages before an explicit origin are
// rejected.
inline std::vector<MinuteBin> bin_by_minute(const std::vector<Message> &msgs,
                                            const AliasTable &aliases,
                                            const BinningOptions &opts = {}) {
  std::vector<MinuteBin> bins;
  if (msgs.empty()) return bins;
  Timestamp origin = opts.event_start.value_or(msgs.front().t);
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    const Message &m = msgs[i];
    if (i && m.t < msgs[i - 1].t) {
      throw ValidationError("messages are not time-ordered at id '" + m.id +
                            "'");
    }
    if (m.t < origin) {
      throw ValidationError("message '" + m.id + "' precedes event start");
    }
    auto index = static_cast<std::size_t>((m.t - origin) / 60);
    while (bins.size() <= index) {
      MinuteBin b;
      b.minute_index = static_cast<std::int64_t>(bins.size());
      b.start_t = origin + 60 * b.minute_index;
      bins.push_back(std::move(b));
    }
    MinuteBin &bin = bins[index];
    bin.message_ids.push_back(m.id);
    for (const std::string &c : tag_mentions(m, aliases)) ++bin.mention_count[c];
  }
  for (MinuteBin &b : bins) {
    for (const auto &[c, n] : b.mention_count) {
      b.mention_fraction[c] =
          static_cast<double>(n) / static_cast<double>(b.size());
    }
  }
  return bins;
}

inline std::string serialize_bins(const std::vector<MinuteBin> &bins) {
  std::string out;
  for (const MinuteBin &b : bins) {
    nlohmann::json rec = {{"minute_index", b.minute_index},
                          {"start_t", b.start_t},
                          {"message_ids", b.message_ids},
                          {"mention_count", b.mention_count},
                          {"mention_fraction", b.mention_fraction}};
    out += rec.dump();
    out += '\n';
  }
  return out;
}

// Reads bins written by serialize_bins; fractions are recomputed from counts.
inline std::vector<MinuteBin> parse_bins(std::string_view source) {
  std::vector<MinuteBin> bins;
  std::size_t lineno = 0;
  for (std::string_view raw : text::split_lines(source)) {
    ++lineno;
    std::string_view line = text::trim(raw);
    if (line.empty()) continue;
    try {
      nlohmann::json rec = nlohmann::json::parse(line);
      MinuteBin b;
      b.minute_index = rec.at("minute_index").get<std::int64_t>();
      b.start_t = rec.at("start_t").get<Timestamp>();
      b.message_ids = rec.at("message_ids").get<std::vector<std::string>>();
      b.mention_count =
          rec.at("mention_count").get<std::map<std::string, std::size_t>>();
      for (const auto &[c, n] : b.mention_count) {
        b.mention_fraction[c] =
            static_cast<double>(n) / static_cast<double>(b.size());
      }
      if (b.minute_index != static_cast<std::int64_t>(bins.size())) {
        throw ParseError("bins are not consecutive", lineno);
      }
      bins.push_back(std::move(b));
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(std::string("bad bin record: ") + e.what(), lineno);
    }
  }
  return bins;
}

// Message lookup by id over an immutable, time-ordered message list.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Message> msgs) : messages_(std::move(msgs)) {
    for (std::size_t i = 0; i < messages_.size(); ++i) {
      by_id_.emplace(messages_[i].id, i);
    }
  }
  const std::vector<Message> &messages() const { return messages_; }
  const Message *find(const std::string &id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &messages_[it->second];
  }

 private:
  std::vector<Message> messages_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

}  // namespace tvsum

#endif  // TVSUM_CORPUS_HPP_
