#include "qtherm/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace qtherm::detail {

namespace {

// Plans are created once per (length, direction) on an internal aligned
// buffer and reused; the global lock keeps plan creation and the shared
// buffer safe.  Reusing one buffer per plan keeps results bit-identical from
// call to call.
struct PlanEntry {
    fftw_plan plan = nullptr;
    fftw_complex* buffer = nullptr;
};

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

std::map<std::pair<std::size_t, int>, PlanEntry>& plan_cache() {
    static std::map<std::pair<std::size_t, int>, PlanEntry> cache;
    return cache;
}

void execute(std::size_t n, complexd* data, int sign) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    PlanEntry& entry = plan_cache()[{n, sign}];
    if (entry.plan == nullptr) {
        entry.buffer = fftw_alloc_complex(n);
        entry.plan = fftw_plan_dft_1d(static_cast<int>(n), entry.buffer, entry.buffer, sign,
                                      FFTW_ESTIMATE);
    }
    std::memcpy(entry.buffer, data, n * sizeof(fftw_complex));
    fftw_execute(entry.plan);
    std::memcpy(data, entry.buffer, n * sizeof(fftw_complex));
}

} // namespace

void fft_forward(std::size_t n, complexd* data) { execute(n, data, FFTW_FORWARD); }

void fft_inverse(std::size_t n, complexd* data) {
    execute(n, data, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) data[i] *= scale;
}

double fft_wavenumber(std::size_t j, std::size_t n, double length) {
    const double dk = 2.0 * std::numbers::pi / length;
    const auto half = n / 2;
    const double mode = j <= half ? static_cast<double>(j)
                                  : static_cast<double>(j) - static_cast<double>(n);
    return dk * mode;
}

} // namespace qtherm::detail
