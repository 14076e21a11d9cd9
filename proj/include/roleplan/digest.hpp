#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace roleplan {

std::string sha256_hex(std::string_view bytes);

std::string base64_encode(std::string_view bytes);

// Whole file as bytes. Throws ImageUnreadable when the file cannot be opened,
// since every caller reads scene images.
std::string read_binary_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

} // namespace roleplan
