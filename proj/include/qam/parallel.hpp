#pragma once

#include <exception>
#include <mutex>

namespace qam {

/// Thread cap from QAM_THREADS (0 or unset = OpenMP default). Applied once.
int configured_threads();

/// Overrides the cap for subsequent parallel regions; 0 restores the default.
void set_thread_limit(int threads);

/// Keeps the exception thrown at the lowest index inside an OpenMP loop so the
/// rethrown error does not depend on the schedule.
class FirstError {
 public:
  void capture(long index) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!error_ || index < index_) {
      index_ = index;
      error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }
  [[nodiscard]] bool failed() const noexcept { return static_cast<bool>(error_); }

 private:
  std::mutex mu_;
  long index_ = 0;
  std::exception_ptr error_;
};

}  // namespace qam
