// Copyright 2026 The qsynth Authors.
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

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "qsynth/common.hpp"
#include "qsynth/rng.hpp"

namespace qsynth {

/// Angles of the three-parameter single-qubit rotation
///
///   U3(a, b, l) = [[ cos(a/2),          -e^{il} sin(a/2)     ],
///                  [ e^{ib} sin(a/2),    e^{i(b+l)} cos(a/2) ]].
struct U3Params {
    double alpha = 0.0;
    double beta = 0.0;
    double lambda = 0.0;
};

inline Mat2 u3_matrix(const U3Params& p) {
    require_finite_angle(p.alpha, "alpha");
    require_finite_angle(p.beta, "beta");
    require_finite_angle(p.lambda, "lambda");
    const double c = std::cos(p.alpha / 2.0);
    const double s = std::sin(p.alpha / 2.0);
    const cplx eb = std::polar(1.0, p.beta);
    const cplx el = std::polar(1.0, p.lambda);
    Mat2 u;
    u << c, -el * s,  //
        eb * s, eb * el * c;
    return u;
}

inline Mat2 u3_matrix(double alpha, double beta, double lambda) {
    return u3_matrix(U3Params{alpha, beta, lambda});
}

/// Two-qubit excitation-preserving gate
///
///   fSim(theta, phi) = [[1, 0,             0,             0        ],
///                       [0, cos(theta),    -i sin(theta), 0        ],
///                       [0, -i sin(theta), cos(theta),    0        ],
///                       [0, 0,             0,             e^{-i phi}]].
///
/// The constructor is literal: out-of-range angles are used verbatim.
inline Mat4 fsim_matrix(double theta, double phi) {
    require_finite_angle(theta, "theta");
    require_finite_angle(phi, "phi");
    const double c = std::cos(theta);
    const cplx mis(0.0, -std::sin(theta));
    Mat4 u = Mat4::Zero();
    u(0, 0) = 1.0;
    u(1, 1) = c;
    u(1, 2) = mis;
    u(2, 1) = mis;
    u(2, 2) = c;
    u(3, 3) = std::polar(1.0, -phi);
    return u;
}

/// Maps (theta, phi) into the reduced range [0, pi/2] x [0, pi].
/// Uses the local-equivalence symmetries theta ~ theta + pi, theta ~ -theta
/// and phi ~ phi + 2 pi, phi ~ -phi.
inline std::pair<double, double> canonical_fsim_angles(double theta, double phi) {
    require_finite_angle(theta, "theta");
    require_finite_angle(phi, "phi");
    double t = std::fmod(theta, pi);
    if (t < 0.0) {
        t += pi;
    }
    if (t > pi / 2.0) {
        t = pi - t;
    }
    double p = std::fmod(phi, 2.0 * pi);
    if (p < 0.0) {
        p += 2.0 * pi;
    }
    if (p > pi) {
        p = 2.0 * pi - p;
    }
    return {t, p};
}

/// A point of the fSim gate family, with an optional display alias.
/// Named gates resolve to fixed parameters:
///   syc     = fSim(pi/2, pi/6)
///   sqiswap = fSim(pi/4, 0)
///   cz      = fSim(0, pi)
///   iswap   = fSim(pi/2, 0)
///   swap    = fSim(pi/2, pi)   (locally equivalent to the SWAP permutation)
///   xy:t    = fSim(t/2, 0)
///   cz:p    = fSim(0, p)
struct GateKind {
    double theta = 0.0;
    double phi = 0.0;
    std::string name;  // empty when constructed from raw parameters

    static GateKind fsim(double theta, double phi) { return {theta, phi, {}}; }
    static GateKind syc() { return {pi / 2.0, pi / 6.0, "syc"}; }
    static GateKind sqiswap() { return {pi / 4.0, 0.0, "sqiswap"}; }
    static GateKind cz() { return {0.0, pi, "cz"}; }
    static GateKind iswap() { return {pi / 2.0, 0.0, "iswap"}; }
    static GateKind swap() { return {pi / 2.0, pi, "swap"}; }
    static GateKind xy(double theta) { return {theta / 2.0, 0.0, {}}; }
    static GateKind cphase(double phi) { return {0.0, phi, {}}; }

    Mat4 matrix() const { return fsim_matrix(theta, phi); }

    GateKind canonical() const {
        auto [t, p] = canonical_fsim_angles(theta, phi);
        return {t, p, name};
    }
};

inline bool same_gate(const GateKind& a, const GateKind& b, double tol = 1e-12) {
    const GateKind ca = a.canonical();
    const GateKind cb = b.canonical();
    return std::abs(ca.theta - cb.theta) <= tol && std::abs(ca.phi - cb.phi) <= tol;
}

/// Key for fidelity maps and seed derivation: canonical angles quantized to
/// 1e-9 rad so that repeated textual spellings of the same gate collide.
inline std::uint64_t gate_key(const GateKind& g) {
    const GateKind c = g.canonical();
    const auto qt = static_cast<std::int64_t>(std::llround(c.theta * 1e9));
    const auto qp = static_cast<std::int64_t>(std::llround(c.phi * 1e9));
    return derive_seed(static_cast<std::uint64_t>(qt), static_cast<std::uint64_t>(qp));
}

namespace detail {

inline double parse_angle(std::string_view text, const std::string& context) {
    // std::from_chars<double> handles plain decimal/scientific literals.
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw parse_error("invalid angle '" + std::string(text) + "' in gate spec '" + context + "'");
    }
    return value;
}

}  // namespace detail

/// Parses the textual gate syntax used by the CLI and device files:
/// "cz", "syc", "sqiswap", "iswap", "swap", "fsim:<theta>,<phi>",
/// "xy:<theta>", "cz:<phi>" (angles are radians as decimal literals).
inline GateKind parse_gate(std::string_view spec) {
    std::string s(spec);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    const auto colon = s.find(':');
    const std::string head = s.substr(0, colon);
    if (colon == std::string::npos) {
        if (head == "cz") return GateKind::cz();
        if (head == "syc") return GateKind::syc();
        if (head == "sqiswap") return GateKind::sqiswap();
        if (head == "iswap") return GateKind::iswap();
        if (head == "swap") return GateKind::swap();
        throw parse_error("unknown gate name '" + s + "'");
    }
    const std::string args = s.substr(colon + 1);
    if (head == "fsim") {
        const auto comma = args.find(',');
        if (comma == std::string::npos) {
            throw parse_error("expected 'fsim:<theta>,<phi>', got '" + s + "'");
        }
        const double theta = detail::parse_angle(args.substr(0, comma), s);
        const double phi = detail::parse_angle(args.substr(comma + 1), s);
        return GateKind::fsim(theta, phi);
    }
    if (head == "xy") {
        return GateKind::xy(detail::parse_angle(args, s));
    }
    if (head == "cz" || head == "cphase") {
        return GateKind::cphase(detail::parse_angle(args, s));
    }
    throw parse_error("unknown gate family '" + head + "' in '" + s + "'");
}

inline std::string format_gate(const GateKind& g) {
    if (!g.name.empty()) {
        return g.name;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "fsim:%.17g,%.17g", g.theta, g.phi);
    return buf;
}

/// Hilbert-Schmidt fidelity |Tr(U_d† U_t)| / dim. The modulus makes the
/// metric insensitive to global phase; it is 1 exactly when the two
/// unitaries agree up to a phase.
inline double hs_fidelity(const MatX& u_d, const MatX& u_t) {
    if (u_d.rows() != u_d.cols() || u_t.rows() != u_t.cols() || u_d.rows() != u_t.rows()) {
        throw std::invalid_argument("hs_fidelity: dimension mismatch");
    }
    const cplx overlap = (u_d.adjoint() * u_t).trace();
    return std::abs(overlap) / static_cast<double>(u_t.rows());
}

/// Haar-distributed 4x4 unitary, deterministic per seed. QR of a complex
/// Ginibre matrix with the R-diagonal phases folded back into Q.
inline Mat4 haar_su4(std::uint64_t seed) {
    SplitMix64 rng(seed);
    Mat4 ginibre;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            ginibre(i, j) = rng.next_complex_gaussian();
        }
    }
    Eigen::HouseholderQR<Mat4> qr(ginibre);
    Mat4 q = qr.householderQ();
    const Mat4 r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < 4; ++j) {
        const cplx d = r(j, j);
        q.col(j) *= d / std::abs(d);
    }
    return q;
}

/// exp(-i beta Z (x) Z) = diag(e^{-i beta}, e^{i beta}, e^{i beta}, e^{-i beta}).
inline Mat4 zz_interaction(double beta) {
    require_finite_angle(beta, "beta");
    Mat4 u = Mat4::Zero();
    const cplx minus = std::polar(1.0, -beta);
    const cplx plus = std::polar(1.0, beta);
    u(0, 0) = minus;
    u(1, 1) = plus;
    u(2, 2) = plus;
    u(3, 3) = minus;
    return u;
}

/// exp(-i beta (X(x)X + Y(x)Y)/2); rotates within span{|01>, |10>} and
/// coincides with fSim(beta, 0).
inline Mat4 xxyy_interaction(double beta) {
    return fsim_matrix(beta, 0.0);
}

/// Controlled-phase gate of the Fourier-transform ladder,
/// diag(1, 1, 1, e^{i pi / 2^t}).
inline Mat4 qft_cphase(int t) {
    if (t < 1) {
        throw std::invalid_argument("qft_cphase: t must be >= 1");
    }
    Mat4 u = Mat4::Identity();
    u(3, 3) = std::polar(1.0, pi / std::pow(2.0, t));
    return u;
}

inline Mat4 swap_matrix() {
    Mat4 u = Mat4::Zero();
    u(0, 0) = 1.0;
    u(1, 2) = 1.0;
    u(2, 1) = 1.0;
    u(3, 3) = 1.0;
    return u;
}

/// The two continuous hardware gate families: the full fSim(theta, phi)
/// plane and its XY (phi = 0) subfamily.
enum class ContinuousFamily { FullFSim, FullXY };

/// The two-qubit unitary families the benchmark circuits are built from.
enum class AppKind { QV, QAOA_ZZ, QFT_CP, FH_ZZ, FH_XXYY, SWAP };

/// Angle-parameterized application unitaries. QFT_CP takes the ladder index
/// t (>= 1, integer-valued) as its parameter.
inline Mat4 app_unitary(AppKind kind, double param) {
    switch (kind) {
        case AppKind::QAOA_ZZ:
        case AppKind::FH_ZZ:
            return zz_interaction(param);
        case AppKind::FH_XXYY:
            return xxyy_interaction(param);
        case AppKind::QFT_CP: {
            const double rounded = std::round(param);
            if (!std::isfinite(param) || std::abs(param - rounded) > 1e-9 || rounded < 1.0) {
                throw std::invalid_argument("app_unitary: QFT_CP takes an integer t >= 1");
            }
            return qft_cphase(static_cast<int>(rounded));
        }
        case AppKind::SWAP:
            return swap_matrix();
        case AppKind::QV:
            throw std::invalid_argument("app_unitary: QV takes a seed, not an angle");
    }
    throw std::invalid_argument("app_unitary: unknown kind");
}

/// Seed-parameterized application unitaries (QV only).
inline Mat4 app_unitary(AppKind kind, std::uint64_t seed) {
    if (kind != AppKind::QV) {
        throw std::invalid_argument("app_unitary: only QV takes a seed");
    }
    return haar_su4(seed);
}

/// Parameter-free application unitaries (SWAP only).
inline Mat4 app_unitary(AppKind kind) {
    if (kind != AppKind::SWAP) {
        throw std::invalid_argument("app_unitary: this kind requires a parameter");
    }
    return swap_matrix();
}

}  // namespace qsynth
