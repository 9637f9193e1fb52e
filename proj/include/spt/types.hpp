/*
   Copyright 2026 The spt-sim Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace spt {

using cplx = std::complex<double>;

/// Finite run of complex samples; time or frequency domain depending on use.
using ComplexSequence = std::vector<cplx>;

/// One bit per element, values 0 or 1.
using BitVector = std::vector<std::uint8_t>;

/// Raised when an argument violates a documented precondition.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a zero-forcing system is not full column rank.
class DecodingFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A preamble is a root sequence index plus a cyclic-shift index.
struct PreambleId {
    int root = 1;
    int shift = 1;

    friend auto operator<=>(const PreambleId&, const PreambleId&) = default;
};

inline void require(bool condition, const std::string& message)
{
    if (!condition)
        throw InvalidParameter(message);
}

}  // namespace spt
