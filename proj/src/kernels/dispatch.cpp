#include "mcad/kernels.hpp"

#include "mcad/errors.hpp"

namespace mcad::kern {

extern const KernelTable kScalarKernels;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable kAvx2Kernels;
extern const KernelTable kAvx512Kernels;
#endif

namespace {

bool cpu_has(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return true;
#if defined(__x86_64__) || defined(_M_X64)
        case Backend::Avx2:
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
        case Backend::Avx512:
            return __builtin_cpu_supports("avx512f");
#else
        case Backend::Avx2:
        case Backend::Avx512:
            return false;
#endif
    }
    return false;
}

Backend detect_best() {
    if (cpu_has(Backend::Avx512)) return Backend::Avx512;
    if (cpu_has(Backend::Avx2)) return Backend::Avx2;
    return Backend::Scalar;
}

Backend& active_slot() {
    static Backend active = detect_best();
    return active;
}

}  // namespace

bool backend_available(Backend b) { return cpu_has(b); }

Backend active_backend() { return active_slot(); }

void set_backend(Backend b) {
    if (!cpu_has(b)) {
        throw ConfigError("kernel backend '" + backend_name(b) + "' not available on this CPU");
    }
    active_slot() = b;
}

void reset_backend() { active_slot() = detect_best(); }

const KernelTable& kernel_table(Backend b) {
    if (!cpu_has(b)) {
        throw ConfigError("kernel backend '" + backend_name(b) + "' not available on this CPU");
    }
    switch (b) {
        case Backend::Scalar:
            return kScalarKernels;
#if defined(__x86_64__) || defined(_M_X64)
        case Backend::Avx2:
            return kAvx2Kernels;
        case Backend::Avx512:
            return kAvx512Kernels;
#else
        default:
            break;
#endif
    }
    return kScalarKernels;
}

const KernelTable& kernels() { return kernel_table(active_slot()); }

std::string backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return "scalar";
        case Backend::Avx2:
            return "avx2";
        case Backend::Avx512:
            return "avx512";
    }
    return "?";
}

void select_backend_by_name(const std::string& name) {
    if (name == "auto") {
        reset_backend();
    } else if (name == "scalar") {
        set_backend(Backend::Scalar);
    } else if (name == "avx2") {
        set_backend(Backend::Avx2);
    } else if (name == "avx512") {
        set_backend(Backend::Avx512);
    } else {
        throw ConfigError("unknown kernel backend '" + name + "' (scalar|avx2|avx512|auto)");
    }
}

}  // namespace mcad::kern
