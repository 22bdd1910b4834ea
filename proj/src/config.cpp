#include "hmertk/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "hmertk/tokenizer.hpp"

namespace hmertk {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Parses an INI-ish file and hands each (section, line) to the sink.
void for_each_entry(
    const std::string& path,
    const std::function<void(const std::string&, const std::string&, std::size_t)>&
        sink) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    if (section.empty()) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": entry before any [section]");
    }
    sink(section, line, lineno);
  }
}

std::pair<std::string, std::string> split_kv(const std::string& line,
                                             const std::string& path,
                                             std::size_t lineno) {
  std::size_t eq = line.find('=');
  if (eq == std::string::npos) {
    throw ConfigError(path + ":" + std::to_string(lineno) +
                      ": expected 'key = value'");
  }
  return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

double parse_probability(const std::string& value, const std::string& path,
                         std::size_t lineno) {
  try {
    double p = std::stod(value);
    if (p < 0.0 || p > 1.0) throw std::out_of_range("probability");
    return p;
  } catch (const std::exception&) {
    throw ConfigError(path + ":" + std::to_string(lineno) +
                      ": probability must be in [0, 1], got '" + value + "'");
  }
}

}  // namespace

NormalizationConfig load_normalization_config(const std::string& path) {
  NormalizationConfig cfg = NormalizationConfig::defaults();
  bool saw_aliases = false, saw_styles = false, saw_removals = false;

  for_each_entry(path, [&](const std::string& section, const std::string& line,
                           std::size_t lineno) {
    if (section == "aliases") {
      if (!saw_aliases) {
        cfg.alias_map.clear();
        saw_aliases = true;
      }
      auto [key, value] = split_kv(line, path, lineno);
      if (key.empty() || value.empty()) {
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": alias needs both sides");
      }
      cfg.alias_map[key] = value;
    } else if (section == "strip_styles") {
      if (!saw_styles) {
        cfg.strip_styles.clear();
        saw_styles = true;
      }
      cfg.strip_styles.insert(line);
    } else if (section == "remove_tokens") {
      if (!saw_removals) {
        cfg.remove_tokens.clear();
        saw_removals = true;
      }
      try {
        cfg.remove_tokens.push_back(tokenize(line));
      } catch (const TokenizeError& e) {
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": unparseable removal pattern: " + e.what());
      }
    } else if (section == "vocabulary") {
      cfg.extra_vocabulary.insert(line);
    } else {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": unknown section [" + section + "]");
    }
  });

  cfg.validate_aliases();
  return cfg;
}

editops::InjectionConfig load_injection_config(const std::string& path) {
  editops::InjectionConfig cfg = editops::InjectionConfig::defaults();
  bool saw_pairs = false;

  for_each_entry(path, [&](const std::string& section, const std::string& line,
                           std::size_t lineno) {
    if (section == "pairs") {
      if (!saw_pairs) {
        cfg.confusion_pairs.clear();
        saw_pairs = true;
      }
      std::istringstream ss(line);
      std::string a, b, rest;
      if (!(ss >> a >> b) || (ss >> rest)) {
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": pair needs exactly two tokens");
      }
      cfg.confusion_pairs.emplace_back(a, b);
    } else if (section == "probabilities") {
      auto [key, value] = split_kv(line, path, lineno);
      if (key == "substitute") {
        cfg.p_substitute = parse_probability(value, path, lineno);
      } else if (key == "delete") {
        cfg.p_delete = parse_probability(value, path, lineno);
      } else if (key == "insert") {
        cfg.p_insert = parse_probability(value, path, lineno);
      } else {
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": unknown probability '" + key + "'");
      }
    } else if (section == "limits") {
      auto [key, value] = split_kv(line, path, lineno);
      if (key == "max_edits") {
        try {
          long v = std::stol(value);
          if (v < 1) throw std::out_of_range("max_edits");
          cfg.max_edits = static_cast<std::size_t>(v);
        } catch (const std::exception&) {
          throw ConfigError(path + ":" + std::to_string(lineno) +
                            ": max_edits must be a positive integer");
        }
      } else if (key == "confusion_only") {
        if (value == "true" || value == "1") {
          cfg.confusion_only = true;
        } else if (value == "false" || value == "0") {
          cfg.confusion_only = false;
        } else {
          throw ConfigError(path + ":" + std::to_string(lineno) +
                            ": confusion_only must be true or false");
        }
      } else {
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": unknown limit '" + key + "'");
      }
    } else {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": unknown section [" + section + "]");
    }
  });

  return cfg;
}

}  // namespace hmertk
