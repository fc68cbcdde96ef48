#include "gazesim/keyvalue.hpp"

#include "gazesim/csv.hpp"
#include "gazesim/error.hpp"

namespace gazesim {

KeyValueFile KeyValueFile::parse(std::string_view text) {
  KeyValueFile kv;
  std::size_t line_no = 0;
  for (const auto raw : csv::lines(text)) {
    ++line_no;
    const auto line = csv::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::InvalidArgument, "line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = csv::trim(line.substr(0, eq));
    if (key.empty()) throw Error(Errc::InvalidArgument, "line " + std::to_string(line_no) + ": empty key");
    kv.values_[std::string(key)] = std::string(csv::trim(line.substr(eq + 1)));
  }
  return kv;
}

void KeyValueFile::set(const std::string& key, std::string value) { values_[key] = std::move(value); }

std::optional<std::string> KeyValueFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> KeyValueFile::get_double(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  const auto d = csv::parse_double(*v);
  if (!d) throw Error(Errc::InvalidArgument, "key '" + key + "': '" + *v + "' is not a number");
  return d;
}

std::optional<long long> KeyValueFile::get_int(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  const auto i = csv::parse_int(*v);
  if (!i) throw Error(Errc::InvalidArgument, "key '" + key + "': '" + *v + "' is not an integer");
  return i;
}

std::string KeyValueFile::serialize(std::string_view comment) const {
  std::string out;
  std::size_t pos = 0;
  while (pos < comment.size()) {
    auto end = comment.find('\n', pos);
    if (end == std::string_view::npos) end = comment.size();
    out += "# ";
    out += comment.substr(pos, end - pos);
    out += '\n';
    pos = end + 1;
  }
  for (const auto& [k, v] : values_) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

}  // namespace gazesim
