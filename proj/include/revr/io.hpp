#pragma once

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace revr {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::filesystem::path& path);

// Writes `contents` to a sibling temp file and renames it over `path`, so
// readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Invokes `fn(line_number, record)` for every non-blank line of a
// line-delimited JSON file. Line numbers are 1-based. Parse failures are
// reported through `on_error(line_number, message)`, which must throw.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(std::size_t, const nlohmann::json&)>& fn,
                    const std::function<void(std::size_t, const std::string&)>& on_error);

}  // namespace revr
