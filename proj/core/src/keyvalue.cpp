#include "ivuq/keyvalue.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ivuq/errors.hpp"

namespace ivuq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw InvalidArgument("cannot parse '" + text + "' as a number for " + what);
  return v;
}

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
  KeyValueFile kv;
  kv.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    // Inline comments start at whitespace followed by '#' or ';'.
    for (std::size_t i = 1; i < t.size(); ++i)
      if ((t[i] == '#' || t[i] == ';') && std::isspace(static_cast<unsigned char>(t[i - 1]))) {
        t = trim(t.substr(0, i));
        break;
      }
    if (t.front() == '[') {
      if (t.back() != ']') throw InvalidArgument(origin + ":" + std::to_string(line_no) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument(origin + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    kv.add(key, trim(t.substr(eq + 1)));
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

const std::string& KeyValueFile::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw InvalidArgument(origin_ + ": missing key '" + key + "'");
  return it->second.back();
}

std::optional<std::string> KeyValueFile::find(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second.back();
}

const std::vector<std::string>& KeyValueFile::all(const std::string& key) const {
  static const std::vector<std::string> empty;
  auto it = values_.find(key);
  return it == values_.end() ? empty : it->second;
}

std::vector<std::string> KeyValueFile::keys() const { return order_; }

double KeyValueFile::get_double(const std::string& key) const { return to_double(get(key), key); }

long long KeyValueFile::get_int(const std::string& key) const {
  const std::string t = trim(get(key));
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw InvalidArgument(origin_ + ": cannot parse '" + t + "' as an integer for " + key);
  return v;
}

std::vector<double> KeyValueFile::get_doubles(const std::string& key) const { return parse_doubles(get(key), key); }

void KeyValueFile::set(const std::string& key, std::string value) {
  if (!values_.count(key)) order_.push_back(key);
  values_[key] = {std::move(value)};
}

void KeyValueFile::add(const std::string& key, std::string value) {
  if (!values_.count(key)) order_.push_back(key);
  values_[key].push_back(std::move(value));
}

std::string KeyValueFile::to_string() const {
  std::ostringstream out;
  std::string current;
  for (const auto& key : order_) {
    const auto dot = key.find('.');
    const std::string section = dot == std::string::npos ? std::string{} : key.substr(0, dot);
    const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
    if (section != current) {
      out << "\n[" << section << "]\n";
      current = section;
    }
    for (const auto& v : values_.at(key)) out << name << " = " << v << "\n";
  }
  return out.str();
}

std::vector<double> parse_doubles(const std::string& csv, const std::string& what) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ',')) out.push_back(to_double(item, what));
  return out;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + format_double(values[i]);
  return out;
}

}  // namespace ivuq
