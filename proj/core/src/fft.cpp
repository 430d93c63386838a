#include "mfa/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace mfa {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

std::vector<std::complex<double>> rfft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n == 0) throw std::invalid_argument("rfft: empty input");
    std::vector<double> in(x);
    std::vector<std::complex<double>> out(n / 2 + 1);

    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

std::vector<double> irfft(const std::vector<std::complex<double>>& spec, std::size_t n) {
    if (spec.size() != n / 2 + 1)
        throw std::invalid_argument("irfft: spectrum size must be n/2+1");
    std::vector<std::complex<double>> in(spec);
    std::vector<double> out(n);

    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                    out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    for (auto& v : out) v /= static_cast<double>(n);
    return out;
}

std::vector<double> periodogram(const std::vector<double>& x) {
    auto spec = rfft(x);
    std::vector<double> p(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) p[k] = std::norm(spec[k]);
    return p;
}

} // namespace mfa
