#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "advmri/types.hpp"

namespace advmri::detail {

// Plan cache keyed by (rank, n, sign). Plans are created once under a lock
// (FFTW's planner is not thread-safe) and executed via the new-array
// interface, which is safe to call concurrently. FFTW_UNALIGNED makes the
// plans independent of buffer alignment.
class FftPlans {
  public:
    static FftPlans& instance() {
        static FftPlans plans;
        return plans;
    }

    fftw_plan get(int rank, int n, int sign) {
        std::scoped_lock lock(mutex_);
        const auto key = std::tuple{rank, n, sign};
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;

        const std::size_t count = rank == 1 ? static_cast<std::size_t>(n)
                                            : static_cast<std::size_t>(n) * n;
        std::vector<std::complex<double>> a(count), b(count);
        auto* in = reinterpret_cast<fftw_complex*>(a.data());
        auto* out = reinterpret_cast<fftw_complex*>(b.data());
        fftw_plan plan = rank == 1
            ? fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
            : fftw_plan_dft_2d(n, n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        cache_.emplace(key, plan);
        return plan;
    }

    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

  private:
    FftPlans() = default;
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> cache_;
};

/// Raw (unnormalized) out-of-place transform; in and out must be distinct.
inline void fft_exec(int rank, int n, int sign, const cdouble* in, cdouble* out) {
    fftw_plan plan = FftPlans::instance().get(rank, n, sign);
    fftw_execute_dft(plan,
                     reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

inline void fft2_raw(const cdouble* in, cdouble* out, int n, bool inverse) {
    fft_exec(2, n, inverse ? FFTW_BACKWARD : FFTW_FORWARD, in, out);
}

inline void fft1_raw(const cdouble* in, cdouble* out, int n, bool inverse) {
    fft_exec(1, n, inverse ? FFTW_BACKWARD : FFTW_FORWARD, in, out);
}

}  // namespace advmri::detail
