#include <cstdlib>
#include <stdexcept>
#include <string>

#include "bvx/kernels.hpp"

namespace bvx::kernels {

bool avx2_compiled() noexcept;

bool available(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
            return avx2_compiled() && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

const Table& table(Isa isa) {
    if (!available(isa)) throw std::runtime_error("kernel variant not available on this CPU: " + std::string(name(isa)));
    return isa == Isa::avx2 ? avx2_table() : scalar_table();
}

Isa active_isa() noexcept {
    static const Isa chosen = [] {
        const char* forced = std::getenv("BVEXTEND_ISA");
        if (forced != nullptr && std::string(forced) == "scalar") return Isa::scalar;
        return available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
    }();
    return chosen;
}

std::string_view name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace bvx::kernels
