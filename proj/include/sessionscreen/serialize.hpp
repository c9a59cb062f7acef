#pragma once

#include "sessionscreen/eval.hpp"
#include "sessionscreen/reduce.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace sessionscreen {

inline constexpr int kModelFormatVersion = 1;

// Model bundle JSON. Matrices are {"rows", "cols", "data"} with data in
// row-major order.
std::string pipeline_to_json(const FittedPipeline& pipeline);
FittedPipeline pipeline_from_json(const std::string& json_text);

std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace sessionscreen
