#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace mbias::detail {

struct CodePoint {
    char32_t value;
    std::size_t byte_offset;
};

/// Decodes UTF-8; invalid sequences become U+FFFD.
std::vector<CodePoint> decode_utf8(std::string_view text);

}  // namespace mbias::detail
