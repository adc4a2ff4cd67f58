#include "kdv5/transform.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace kdv5 {

namespace {

struct PlanEntry {
    fftw_plan plan = nullptr;
    fftw_complex* buf = nullptr;
    std::size_t n = 0;

    PlanEntry() = default;
    PlanEntry(const PlanEntry&) = delete;
    PlanEntry& operator=(const PlanEntry&) = delete;
    PlanEntry(PlanEntry&& o) noexcept : plan(o.plan), buf(o.buf), n(o.n) {
        o.plan = nullptr;
        o.buf = nullptr;
    }
    PlanEntry& operator=(PlanEntry&& o) noexcept {
        std::swap(plan, o.plan);
        std::swap(buf, o.buf);
        n = o.n;
        return *this;
    }
    ~PlanEntry() {
        if (plan) fftw_destroy_plan(plan);
        if (buf) fftw_free(buf);
    }
};

// Cached in-place plans keyed by (dims, sign).  FFTW planning is not
// thread safe; execution through the shared buffer is serialized too.
std::map<std::pair<std::vector<int>, int>, PlanEntry>& plan_cache() {
    static std::map<std::pair<std::vector<int>, int>, PlanEntry> cache;
    return cache;
}
std::mutex plan_mutex;

}  // namespace

void dft(std::vector<Complex>& data, const std::vector<int>& dims, int sign) {
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    if (data.size() != total) throw ConfigError("dft: data size does not match dims");

    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(dims, sign);
    auto it = plan_cache().find(key);
    if (it == plan_cache().end()) {
        PlanEntry entry;
        entry.n = total;
        entry.buf = fftw_alloc_complex(total);
        // FFTW_BACKWARD is the e^{+i...} (synthesis) direction.
        entry.plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), entry.buf,
                                   entry.buf, sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD,
                                   FFTW_ESTIMATE);
        if (!entry.plan) throw NumericalError("dft: fftw plan creation failed");
        it = plan_cache().emplace(key, std::move(entry)).first;
    }
    PlanEntry& e = it->second;
    auto* src = reinterpret_cast<const double*>(data.data());
    auto* dst = reinterpret_cast<double*>(e.buf);
    std::copy(src, src + 2 * total, dst);
    fftw_execute(e.plan);
    std::copy(dst, dst + 2 * total, reinterpret_cast<double*>(data.data()));
}

int fft_friendly(int n) {
    for (int m = n;; ++m) {
        int r = m;
        for (int p : {2, 3, 5, 7})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

}  // namespace kdv5
