#include "alloc_probe.hpp"

#include <cstdlib>
#include <new>

namespace {

thread_local bool g_active = false;
thread_local std::size_t g_count = 0;

void* counted_alloc(std::size_t size) {
    if (g_active) ++g_count;
    if (void* p = std::malloc(size == 0 ? 1 : size)) return p;
    throw std::bad_alloc();
}

}  // namespace

namespace slidealign::tools {

void AllocProbe::start() noexcept {
    g_count = 0;
    g_active = true;
}

std::size_t AllocProbe::stop() noexcept {
    g_active = false;
    return g_count;
}

}  // namespace slidealign::tools

void* operator new(std::size_t size) { return counted_alloc(size); }
void* operator new[](std::size_t size) { return counted_alloc(size); }
void operator delete(void* p) noexcept { std::free(p); }
void operator delete[](void* p) noexcept { std::free(p); }
void operator delete(void* p, std::size_t) noexcept { std::free(p); }
void operator delete[](void* p, std::size_t) noexcept { std::free(p); }
