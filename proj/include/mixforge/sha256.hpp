#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace mixforge {

// Lowercase hex SHA-256 digest. Backed by OpenSSL's EVP interface.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file_hex(const std::filesystem::path& path);

} // namespace mixforge
