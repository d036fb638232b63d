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

#ifndef FADESTAT_ERROR_HPP
#define FADESTAT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace fadestat {

enum class ErrorKind {
  domain,
  overflow,
  invalid_parameter,
  nonexistent_moment,
  not_reducible,
  degenerate_data,
  support_mismatch,
  alignment_failure,
  empty_signal,
  no_bursts_found,
  unknown_tap,
  unknown_preset,
  input,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` discriminates the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace fadestat

#endif  // FADESTAT_ERROR_HPP
