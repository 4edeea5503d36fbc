#pragma once

#include <cstddef>

namespace slidealign::tools {

/// Counts heap allocations made by the calling thread between start() and
/// stop(). Backed by the replacement operator new in alloc_probe.cpp.
class AllocProbe {
public:
    static void start() noexcept;
    static std::size_t stop() noexcept;
};

}  // namespace slidealign::tools
