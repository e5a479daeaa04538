// Copyright 2026 The timbremap Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace timbremap {

enum class ErrorKind {
    parameter,
    domain,
    decode,
    empty_input,
    empty_set,
    aliasing,
    zero_variance,
    insufficient_data,
    capacity,
    unresolved_overlap,
    undefined_descriptor,
    integrity,
    conflict,
    not_found,
    io,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::parameter: return "parameter";
        case ErrorKind::domain: return "domain";
        case ErrorKind::decode: return "decode";
        case ErrorKind::empty_input: return "empty_input";
        case ErrorKind::empty_set: return "empty_set";
        case ErrorKind::aliasing: return "aliasing";
        case ErrorKind::zero_variance: return "zero_variance";
        case ErrorKind::insufficient_data: return "insufficient_data";
        case ErrorKind::capacity: return "capacity";
        case ErrorKind::unresolved_overlap: return "unresolved_overlap";
        case ErrorKind::undefined_descriptor: return "undefined_descriptor";
        case ErrorKind::integrity: return "integrity";
        case ErrorKind::conflict: return "conflict";
        case ErrorKind::not_found: return "not_found";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

/// Every failure raised by the library. `kind()` lets callers (the CLI and
/// the HTTP layer in particular) map errors onto exit codes / status codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) {
        fail(kind, message);
    }
}

}  // namespace timbremap
