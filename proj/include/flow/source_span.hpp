#pragma once

#include <cstddef>

namespace flow {

struct SourcePosition {
    std::size_t offset = 0;  // byte offset
    int line = 1;            // 1-based
    int column = 1;          // 1-based, in bytes
    friend bool operator==(const SourcePosition&, const SourcePosition&) = default;
};

struct SourceSpan {
    SourcePosition begin;
    SourcePosition end;
    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

}  // namespace flow
