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

// Thin FFTW wrapper. Plans are created once per (length, direction) under a
// lock; execution through the new-array interface is reentrant.

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>

#include "spt/types.hpp"

namespace spt::fft {

namespace detail {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

inline fftw_plan shared_plan(int n, int sign)
{
    static std::mutex mutex;
    static std::map<std::pair<int, int>, PlanHandle> cache;

    std::lock_guard lock(mutex);
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second.get();

    // Planning scratch only; FFTW_ESTIMATE does not touch the arrays.
    ComplexSequence in(n), out(n);
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                   reinterpret_cast<fftw_complex*>(out.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
    if (p == nullptr)
        throw std::runtime_error("fftw plan creation failed");
    cache.emplace(key, PlanHandle(p));
    return p;
}

// Per-thread front cache so workers only take the lock on first use.
inline fftw_plan plan_for(int n, int sign)
{
    thread_local std::map<std::pair<int, int>, fftw_plan> local;
    const auto key = std::make_pair(n, sign);
    if (auto it = local.find(key); it != local.end())
        return it->second;
    fftw_plan p = shared_plan(n, sign);
    local.emplace(key, p);
    return p;
}

inline void execute(std::span<const cplx> in, std::span<cplx> out, int sign)
{
    require(!in.empty() && in.size() == out.size(), "fft: size mismatch");
    require(in.data() != out.data(), "fft: in-place transform not supported");
    fftw_plan p = plan_for(static_cast<int>(in.size()), sign);
    // PRESERVE_INPUT guarantees the input is not written.
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace detail

/// X[k] = sum_n x[n] exp(-j 2 pi k n / N)
inline void forward(std::span<const cplx> in, std::span<cplx> out)
{
    detail::execute(in, out, FFTW_FORWARD);
}

/// Unnormalized inverse: x[n] = sum_k X[k] exp(+j 2 pi k n / N)
inline void backward(std::span<const cplx> in, std::span<cplx> out)
{
    detail::execute(in, out, FFTW_BACKWARD);
}

inline ComplexSequence forward(std::span<const cplx> in)
{
    ComplexSequence out(in.size());
    forward(in, out);
    return out;
}

inline ComplexSequence backward(std::span<const cplx> in)
{
    ComplexSequence out(in.size());
    backward(in, out);
    return out;
}

}  // namespace spt::fft
