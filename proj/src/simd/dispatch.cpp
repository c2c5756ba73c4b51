#include <atomic>
#include <cstdlib>
#include <string>
#include <string_view>

#include "edof/errors.hpp"
#include "edof/simd.hpp"

namespace edof::simd {
namespace {

bool cpu_has_avx2() noexcept
{
#if defined(EDOF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* table_for(Isa isa) noexcept
{
    switch (isa) {
    case Isa::scalar:
        return &scalar_kernels();
    case Isa::avx2:
#if defined(EDOF_HAVE_AVX2)
        return cpu_has_avx2() ? &avx2_kernels() : nullptr;
#else
        return nullptr;
#endif
    }
    return nullptr;
}

const KernelTable* default_table() noexcept
{
    if (const char* env = std::getenv("EDOF_SIMD")) {
        const std::string_view v(env);
        if (v == "scalar") return &scalar_kernels();
        if (v == "avx2")
            if (const auto* t = table_for(Isa::avx2)) return t;
    }
    if (const auto* t = table_for(Isa::avx2)) return t;
    return &scalar_kernels();
}

std::atomic<const KernelTable*>& active() noexcept
{
    static std::atomic<const KernelTable*> table{default_table()};
    return table;
}

} // namespace

bool isa_available(Isa isa) noexcept
{
    return table_for(isa) != nullptr;
}

std::string_view isa_name(Isa isa) noexcept
{
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

const KernelTable& kernels() noexcept
{
    return *active().load(std::memory_order_acquire);
}

Isa active_isa() noexcept
{
    return kernels().isa;
}

void force_isa(Isa isa)
{
    const auto* t = table_for(isa);
    if (!t) throw DomainError(std::string("SIMD variant not available: ") + std::string(isa_name(isa)));
    active().store(t, std::memory_order_release);
}

void reset_isa() noexcept
{
    active().store(default_table(), std::memory_order_release);
}

} // namespace edof::simd
