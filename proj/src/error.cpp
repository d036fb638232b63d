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

#include "fadestat/error.hpp"

namespace fadestat {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::invalid_parameter: return "invalid_parameter";
    case ErrorKind::nonexistent_moment: return "nonexistent_moment";
    case ErrorKind::not_reducible: return "not_reducible";
    case ErrorKind::degenerate_data: return "degenerate_data";
    case ErrorKind::support_mismatch: return "support_mismatch";
    case ErrorKind::alignment_failure: return "alignment_failure";
    case ErrorKind::empty_signal: return "empty_signal";
    case ErrorKind::no_bursts_found: return "no_bursts_found";
    case ErrorKind::unknown_tap: return "unknown_tap";
    case ErrorKind::unknown_preset: return "unknown_preset";
    case ErrorKind::input: return "input";
  }
  return "unknown";
}

}  // namespace fadestat
