#include "levylab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace levylab {

namespace {

// FFTW planning is not thread-safe; plan execution via the new-array
// interface is.  Plans are created with FFTW_UNALIGNED so any buffer
// may be passed to fftw_execute_dft.
class PlanCache {
public:
    fftw_plan get(int dim, int n, int sign) {
        std::scoped_lock lock(mutex_);
        auto key = std::make_tuple(dim, n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::size_t count = dim == 1 ? static_cast<std::size_t>(n)
                                     : static_cast<std::size_t>(n) * n;
        fftw_complex* buf = fftw_alloc_complex(count);
        fftw_plan plan = dim == 1
            ? fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
            : fftw_plan_dft_2d(n, n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        if (!plan) throw std::runtime_error("fftw plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void execute(int dim, int n, int sign, const std::complex<double>* in, std::complex<double>* out) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("fft: dim must be 1 or 2");
    if (n <= 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft: n must be a power of two");
    fftw_plan plan = cache().get(dim, n, sign);
    // fftw_execute_dft does not modify the input array for out-of-place
    // transforms; in-place (in == out) is also fine for c2c.
    fftw_execute_dft(plan,
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

} // namespace

void fft_forward(int dim, int n, const std::complex<double>* in, std::complex<double>* out) {
    execute(dim, n, FFTW_FORWARD, in, out);
}

void fft_inverse(int dim, int n, const std::complex<double>* in, std::complex<double>* out) {
    execute(dim, n, FFTW_BACKWARD, in, out);
}

void fft_forward(int dim, int n, cvector& data) {
    execute(dim, n, FFTW_FORWARD, data.data(), data.data());
}

void fft_inverse(int dim, int n, cvector& data) {
    execute(dim, n, FFTW_BACKWARD, data.data(), data.data());
}

} // namespace levylab
