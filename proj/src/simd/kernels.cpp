#include "ffr/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace ffr::simd {
namespace {

const KernelTable* detect() {
    if (const char* forced = std::getenv("FFR_SIMD")) {
        const std::string want(forced);
        if (want == "scalar") return &scalar_kernels();
        if (want == "avx2" && avx2_kernels()) return avx2_kernels();
    }
    if (const KernelTable* t = avx2_kernels()) return t;
    return &scalar_kernels();
}

std::atomic<const KernelTable*>& active() {
    static std::atomic<const KernelTable*> table{detect()};
    return table;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

const KernelTable& kernels() { return *active().load(std::memory_order_relaxed); }

Isa set_active_isa(Isa isa) {
    const Isa previous = kernels().isa;
    const KernelTable* t = (isa == Isa::avx2 && avx2_kernels()) ? avx2_kernels() : &scalar_kernels();
    active().store(t, std::memory_order_relaxed);
    return previous;
}

}  // namespace ffr::simd
