#pragma once

#include <filesystem>
#include <string>

namespace heave {

std::string sha256_hex(const void* data, std::size_t length);
std::string sha256_hex(const std::string& data);
std::string sha256_file_hex(const std::filesystem::path& path);

}  // namespace heave
