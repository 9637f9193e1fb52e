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

// PUSCH-SPT demodulation: per-subcarrier zero-forcing over the detected
// preambles' estimated frequency responses, followed by BPSK slicing.

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "spt/channel.hpp"
#include "spt/detector.hpp"
#include "spt/types.hpp"

namespace spt {

inline ComplexSequence bpsk_modulate(std::span<const std::uint8_t> bits)
{
    ComplexSequence out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        out[i] = bits[i] ? cplx{-1.0, 0.0} : cplx{1.0, 0.0};
    return out;
}

/// Sign of the real part; zero slices to bit 0.
inline BitVector bpsk_demodulate(std::span<const cplx> symbols)
{
    BitVector out(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i)
        out[i] = symbols[i].real() < 0.0 ? 1 : 0;
    return out;
}

using ComplexMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using ComplexVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

inline constexpr double kDefaultRankTol = 1e-9;

namespace detail {

/// Column-pivoted Householder QR. A pivot below rank_tol times the largest
/// pivot counts as zero.
using LeastSquaresQr = Eigen::ColPivHouseholderQR<ComplexMatrix>;

/// Factorizes into `qr` (reusable across calls of the same shape) and writes
/// the solution to `x`. Returns false on rank deficiency.
inline bool least_squares_into(LeastSquaresQr& qr, const ComplexMatrix& a, const ComplexVector& b, double rank_tol,
                               ComplexVector& x)
{
    qr.setThreshold(rank_tol);
    qr.compute(a);
    if (qr.rank() < a.cols())
        return false;
    x = qr.solve(b);
    return true;
}

inline std::optional<ComplexVector> try_least_squares(const ComplexMatrix& a, const ComplexVector& b, double rank_tol)
{
    LeastSquaresQr qr(a.rows(), a.cols());
    ComplexVector x;
    if (!least_squares_into(qr, a, b, rank_tol, x))
        return std::nullopt;
    return x;
}

}  // namespace detail

/// argmin_x ||A x - b||_2 for a full-column-rank M x N system, M >= N >= 1.
inline ComplexVector solve_least_squares(const ComplexMatrix& a, const ComplexVector& b,
                                         double rank_tol = kDefaultRankTol)
{
    require(a.cols() >= 1 && a.rows() >= a.cols(), "solve_least_squares: need M >= N >= 1");
    require(b.size() == a.rows(), "solve_least_squares: right-hand side length != M");
    auto x = detail::try_least_squares(a, b, rank_tol);
    if (!x)
        throw DecodingFailure("solve_least_squares: matrix is not full column rank");
    return *x;
}

struct ZfResult {
    std::vector<BitVector> bits;  // one per detection, same order
    bool failed = false;          // full-rank condition violated; bits are empty
};

/// Zero-forcing decode of every detected preamble's stream. Fails for the
/// whole slot when there are more detections than antennas or any
/// subcarrier's mixing matrix loses column rank.
inline ZfResult zf_decode(std::span<const ComplexSequence> grid, std::span<const DetectedPreamble> detections,
                          double beta, int n_sc, double rank_tol = kDefaultRankTol)
{
    require(!detections.empty(), "zf_decode: no detections");
    require(!grid.empty(), "zf_decode: no antennas");
    require(beta > 0.0, "zf_decode: beta must be positive");
    const auto m_count = static_cast<Eigen::Index>(grid.size());
    const auto d_count = static_cast<Eigen::Index>(detections.size());
    for (const auto& g : grid)
        require(g.size() == static_cast<std::size_t>(n_sc), "zf_decode: grid length != N_sc");

    ZfResult result;
    if (d_count > m_count) {
        result.failed = true;
        return result;
    }

    const double amp = std::sqrt(beta);
    // responses[d][m] = estimated H_{m,d}[f] over all subcarriers
    std::vector<std::vector<ComplexSequence>> responses(detections.size());
    for (std::size_t d = 0; d < detections.size(); ++d) {
        require(detections[d].cir_estimates.size() == grid.size(), "zf_decode: detection antenna count != M");
        for (const auto& w : detections[d].cir_estimates)
            responses[d].push_back(frequency_response(w, n_sc));
    }

    std::vector<ComplexSequence> soft(detections.size(), ComplexSequence(static_cast<std::size_t>(n_sc)));
    ComplexMatrix a(m_count, d_count);
    ComplexVector b(m_count);
    ComplexVector x(d_count);
    detail::LeastSquaresQr qr(m_count, d_count);
    for (int f = 0; f < n_sc; ++f) {
        const auto fi = static_cast<std::size_t>(f);
        for (Eigen::Index m = 0; m < m_count; ++m) {
            b(m) = grid[static_cast<std::size_t>(m)][fi];
            for (Eigen::Index d = 0; d < d_count; ++d)
                a(m, d) = amp * responses[static_cast<std::size_t>(d)][static_cast<std::size_t>(m)][fi];
        }
        if (!detail::least_squares_into(qr, a, b, rank_tol, x)) {
            result.failed = true;
            return result;
        }
        for (Eigen::Index d = 0; d < d_count; ++d)
            soft[static_cast<std::size_t>(d)][fi] = x(d);
    }

    result.bits.reserve(soft.size());
    for (const auto& s : soft)
        result.bits.push_back(bpsk_demodulate(s));
    return result;
}

}  // namespace spt
