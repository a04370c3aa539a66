#pragma once

// Thin RAII layer over FFTW3: real <-> halfcomplex DFTs of one fixed size.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>

namespace fracheat::fft {

using cplx = std::complex<double>;

/// FFTW's planner is not thread-safe; execution on distinct arrays is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
struct FftwDeleter {
  void operator()(T* p) const noexcept { fftw_free(p); }
};

/// Aligned buffer owned by fftw_malloc.
template <class T>
class Buffer {
public:
  Buffer() = default;
  explicit Buffer(std::size_t n)
      : data_(static_cast<T*>(fftw_malloc(sizeof(T) * (n == 0 ? 1 : n)))), size_(n) {
    if (!data_) throw std::bad_alloc();
    for (std::size_t i = 0; i < n; ++i) data_.get()[i] = T{};
  }
  T* data() { return data_.get(); }
  const T* data() const { return data_.get(); }
  std::size_t size() const { return size_; }
  T& operator[](std::size_t i) { return data_.get()[i]; }
  const T& operator[](std::size_t i) const { return data_.get()[i]; }
  std::span<T> span() { return {data_.get(), size_}; }
  std::span<const T> span() const { return {data_.get(), size_}; }
  T* begin() { return data(); }
  T* end() { return data() + size_; }
  const T* begin() const { return data(); }
  const T* end() const { return data() + size_; }

private:
  std::unique_ptr<T, FftwDeleter<T>> data_;
  std::size_t size_ = 0;
};

class Plan {
public:
  Plan() = default;
  explicit Plan(fftw_plan p) : plan_(p) {}
  Plan(Plan&& o) noexcept : plan_(o.plan_) { o.plan_ = nullptr; }
  Plan& operator=(Plan&& o) noexcept {
    if (this != &o) {
      reset();
      plan_ = o.plan_;
      o.plan_ = nullptr;
    }
    return *this;
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() { reset(); }
  fftw_plan get() const { return plan_; }

private:
  void reset() {
    if (plan_) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
      plan_ = nullptr;
    }
  }
  fftw_plan plan_ = nullptr;
};

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

/// In-place real <-> halfcomplex DFT of one fixed size: real() and spectrum()
/// share storage, so each transform overwrites its input. Unnormalized, as
/// FFTW: forward X_k = sum x_m e^{-2 pi i k m/N}, backward x_m = sum X_k e^{+2 pi i k m/N}.
class RealDft {
public:
  /// Plans are made on first use; FFTW precomputes twiddles at plan time,
  /// which dominates for large N.
  explicit RealDft(std::size_t n) : n_(n), buf_(n / 2 + 1) {}

  std::size_t size() const { return n_; }
  std::span<double> real() { return {reinterpret_cast<double*>(buf_.data()), n_}; }
  std::span<cplx> spectrum() { return buf_.span(); }

  /// real() -> spectrum()
  void forward() {
    if (!fwd_.get()) {
      std::lock_guard lock(planner_mutex());
      fwd_ = Plan(fftw_plan_dft_r2c_1d(static_cast<int>(n_), real().data(), as_fftw(buf_.data()),
                                       FFTW_ESTIMATE));
    }
    fftw_execute(fwd_.get());
  }
  /// spectrum() -> real()
  void backward() {
    if (!bwd_.get()) {
      std::lock_guard lock(planner_mutex());
      bwd_ = Plan(fftw_plan_dft_c2r_1d(static_cast<int>(n_), as_fftw(buf_.data()), real().data(),
                                       FFTW_ESTIMATE));
    }
    fftw_execute(bwd_.get());
  }

private:
  std::size_t n_;
  Buffer<cplx> buf_;
  Plan fwd_, bwd_;
};

}  // namespace fracheat::fft
