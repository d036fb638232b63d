// SPDX-License-Identifier: Apache-2.0
//
// fadestat - fading channel statistics toolkit
// Copyright (C) 2026 The fadestat authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef FADESTAT_PARALLEL_HPP
#define FADESTAT_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <mutex>

#if FADESTAT_USE_OPENMP
#include <omp.h>
#define FADESTAT_OMP_STATIC_LOOP _Pragma("omp parallel for schedule(static)")
#define FADESTAT_OMP_DYNAMIC_LOOP _Pragma("omp parallel for schedule(dynamic, 1)")
#else
#define FADESTAT_OMP_STATIC_LOOP
#define FADESTAT_OMP_DYNAMIC_LOOP
#endif

namespace fadestat {

/// Number of threads an OpenMP region would use (1 without OpenMP).
inline int max_threads() noexcept {
#if FADESTAT_USE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Captures the first exception thrown inside a parallel region so it can be
/// rethrown on the calling thread once the region has joined.
class ExceptionSlot {
 public:
  template <typename Fn>
  void run(Fn&& fn) noexcept {
    try {
      fn();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }

  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

}  // namespace fadestat

#endif  // FADESTAT_PARALLEL_HPP
