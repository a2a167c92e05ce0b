#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace valuecast::config {

// Flat key=value text. '#' starts a comment line, blank lines are skipped,
// whitespace around keys and values is trimmed, a repeated key is a Parse
// error.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse(std::string_view content);
KeyValues read_file(const std::filesystem::path& path);  // Io, Parse

}  // namespace valuecast::config
