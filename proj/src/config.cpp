#include "evortex/config.hpp"

#include "evortex/errors.hpp"

#include <fstream>
#include <sstream>

namespace evortex::cfg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

} // namespace

Config Config::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

Config Config::parse_string(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw validation_error("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      c.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw validation_error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw validation_error("config line " + std::to_string(lineno) + ": empty key");
    c.sections_[section][key] = value;
  }
  return c;
}

std::pair<std::string, std::string> Config::split_key(const std::string& dotted) {
  const auto dot = dotted.find('.');
  if (dot == std::string::npos) return {"", dotted};
  return {dotted.substr(0, dot), dotted.substr(dot + 1)};
}

void Config::set(const std::string& dotted_key, const std::string& value) {
  auto [sec, key] = split_key(dotted_key);
  if (key.empty()) throw validation_error("empty config key '" + dotted_key + "'");
  sections_[sec][key] = value;
}

bool Config::has(const std::string& dotted_key) const { return find(dotted_key) != nullptr; }

const std::string* Config::find(const std::string& dotted) const {
  auto [sec, key] = split_key(dotted);
  const auto s = sections_.find(sec);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return nullptr;
  return &k->second;
}

void Config::record(const std::string& dotted, const std::string& value) const {
  auto [sec, key] = split_key(dotted);
  resolved_[sec][key] = value;
}

std::string Config::get_str(const std::string& dotted_key, const std::string& def) const {
  const std::string* v = find(dotted_key);
  const std::string out = v ? *v : def;
  record(dotted_key, out);
  return out;
}

double Config::get_double(const std::string& dotted_key, double def) const {
  const std::string* v = find(dotted_key);
  if (!v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", def);
    record(dotted_key, buf);
    return def;
  }
  try {
    std::size_t pos = 0;
    const double d = std::stod(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    record(dotted_key, *v);
    return d;
  } catch (...) {
    throw validation_error("config key " + dotted_key + ": '" + *v + "' is not a number");
  }
}

int Config::get_int(const std::string& dotted_key, int def) const {
  const std::string* v = find(dotted_key);
  if (!v) {
    record(dotted_key, std::to_string(def));
    return def;
  }
  try {
    std::size_t pos = 0;
    const int i = std::stoi(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("");
    record(dotted_key, *v);
    return i;
  } catch (...) {
    throw validation_error("config key " + dotted_key + ": '" + *v + "' is not an integer");
  }
}

bool Config::get_bool(const std::string& dotted_key, bool def) const {
  const std::string* v = find(dotted_key);
  if (!v) {
    record(dotted_key, def ? "true" : "false");
    return def;
  }
  record(dotted_key, *v);
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw validation_error("config key " + dotted_key + ": '" + *v + "' is not a boolean");
}

std::vector<int> Config::get_int_list(const std::string& dotted_key,
                                      const std::vector<int>& def) const {
  const std::string* v = find(dotted_key);
  if (!v) {
    std::string joined;
    for (std::size_t i = 0; i < def.size(); ++i)
      joined += (i ? "," : "") + std::to_string(def[i]);
    record(dotted_key, joined);
    return def;
  }
  std::vector<int> out;
  std::istringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stoi(item));
    } catch (...) {
      throw validation_error("config key " + dotted_key + ": '" + item + "' is not an integer");
    }
  }
  if (out.empty())
    throw validation_error("config key " + dotted_key + ": empty integer list");
  record(dotted_key, *v);
  return out;
}

std::string Config::require_str(const std::string& dotted_key) const {
  const std::string* v = find(dotted_key);
  if (!v) throw validation_error("missing required config key " + dotted_key);
  record(dotted_key, *v);
  return *v;
}

double Config::require_double(const std::string& dotted_key) const {
  if (!has(dotted_key)) throw validation_error("missing required config key " + dotted_key);
  return get_double(dotted_key, 0.0);
}

std::string Config::serialize_resolved() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [sec, kv] : resolved_) {
    if (!first) out << "\n";
    first = false;
    out << "[" << sec << "]\n";
    for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
  }
  return out.str();
}

} // namespace evortex::cfg
