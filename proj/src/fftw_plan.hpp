#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

namespace scarforge::detail {

// The FFTW planner is not thread-safe; plan creation and destruction share this lock.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// In-place complex transform of fixed size with its own buffer.
class FftPlan {
public:
    FftPlan(int n, int sign) : n_(n), buf_(n) {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        auto* data = reinterpret_cast<fftw_complex*>(buf_.data());
        plan_ = fftw_plan_dft_1d(n_, data, data, sign, FFTW_ESTIMATE);
    }
    ~FftPlan() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    int size() const { return n_; }
    std::complex<double>* data() { return buf_.data(); }
    std::vector<std::complex<double>>& buffer() { return buf_; }
    void execute() { fftw_execute(plan_); }

private:
    int n_;
    std::vector<std::complex<double>> buf_;
    fftw_plan plan_;
};

}  // namespace scarforge::detail
