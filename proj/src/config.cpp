#include "valuecast/config.hpp"

#include <fstream>
#include <sstream>

#include "valuecast/error.hpp"
#include "valuecast/text.hpp"

namespace valuecast::config {

KeyValues parse(std::string_view content) {
  KeyValues out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    const std::size_t end = std::min(content.find('\n', pos), content.size());
    const std::string_view line = text::trim(content.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParse, "config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(text::trim(line.substr(0, eq)));
    if (key.empty()) {
      throw Error(ErrorCode::kParse, "config line " + std::to_string(line_no) + ": empty key");
    }
    if (!out.emplace(key, std::string(text::trim(line.substr(eq + 1)))).second) {
      throw Error(ErrorCode::kParse,
                  "config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

KeyValues read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace valuecast::config
