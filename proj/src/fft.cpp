#include "semilab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "semilab/errors.hpp"

namespace semilab {

namespace {

struct PlanKey {
    std::vector<int> dims;
    int sign;
    bool operator<(const PlanKey& o) const {
        if (sign != o.sign) return sign < o.sign;
        return dims < o.dims;
    }
};

// FFTW plans with FFTW_ESTIMATE may be reused for any aligned buffer via
// fftw_execute_dft. One guru-free plan per (shape, sign).
class PlanCache {
public:
    fftw_plan get(const std::vector<int>& dims, int sign, fftw_complex* buf) {
        std::lock_guard<std::mutex> lock(mu_);
        const PlanKey key{dims, sign};
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        fftw_plan p = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf,
                                    sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
        require(p != nullptr, ErrorKind::precondition, "fftw plan creation failed");
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mu_;
    std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

} // namespace

void fft_inplace(std::complex<double>* data, const std::vector<int>& dims, int sign) {
    fftw_complex* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_plan p = cache().get(dims, sign, buf);
    fftw_execute_dft(p, buf, buf);
}

} // namespace semilab
