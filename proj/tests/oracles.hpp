#pragma once

// Independent fixed-point oracles for the small power-flow corpus. Each
// case iterates its own hand-written recurrence; none of them touch the
// library's sweep solver. The frozen magnitudes below were produced by the
// same recurrences in a standalone script before the solver existed.

#include <complex>
#include <string>

namespace oracles {

using C = std::complex<double>;

inline C zip_pq(double p0, double q0, double zp, double ip, double pp, double zq,
                double iq, double pq, double v) {
    return {p0 * (zp * v * v + ip * v + pp), q0 * (zq * v * v + iq * v + pq)};
}

// C1: slack 1.0 -- z = 0.01+j0.02 -- constant-power load 1.0+j0.5 pu.
inline C c1_load_voltage() {
    const C z{0.01, 0.02};
    const C s{1.0, 0.5};
    C v{1.0, 0.0};
    for (int i = 0; i < 200; ++i)
        v = 1.0 - z * std::conj(s / v);
    return v;
}
inline constexpr double kC1Vmag = 0.979463381764517;

// C2: slack 1.05 -- z = 0.03+j0.06 -- ZIP load p0=0.8, q0=0.4 pu,
// fractions .4/.3/.3 and .5/.2/.3.
inline C c2_load_voltage() {
    const C z{0.03, 0.06};
    C v{1.05, 0.0};
    for (int i = 0; i < 400; ++i) {
        const C s = zip_pq(0.8, 0.4, .4, .3, .3, .5, .2, .3, std::abs(v));
        v = 1.05 - z * std::conj(s / v);
    }
    return v;
}
inline constexpr double kC2Vmag = 1.001372651765686;

// C3: slack 1.02 -- z1 = 0.02+j0.04 -- bus A (constant power 0.5+j0.2 pu)
//     -- z2 = 0.04+j0.03 -- bus B (constant impedance 0.6+j0.3 pu nominal).
struct C3Result { C va, vb; };
inline C3Result c3_voltages() {
    const C z1{0.02, 0.04}, z2{0.04, 0.03};
    C va{1.02, 0.0}, vb{1.02, 0.0};
    for (int i = 0; i < 400; ++i) {
        const C sb = zip_pq(0.6, 0.3, 1, 0, 0, 1, 0, 0, std::abs(vb));
        const C sa{0.5, 0.2};
        const C ib = std::conj(sb / vb);
        const C ia = std::conj(sa / va);
        va = 1.02 - z1 * (ia + ib);
        vb = va - z2 * ib;
    }
    return {va, vb};
}
inline constexpr double kC3VaMag = 0.978230955950052;
inline constexpr double kC3VbMag = 0.946964622704344;

// C4: slack 1.0 -- z = 0.015+j0.03 -- bus M -- ideal ratio transformer at
// tap +4 (ratio 1.025) -- bus E with constant-power load 0.9+j0.45 pu.
struct C4Result { C vm, ve; };
inline C4Result c4_voltages() {
    const C z{0.015, 0.03};
    const double a = 1.0 + 0.00625 * 4;
    const C s{0.9, 0.45};
    C vm{1.0, 0.0}, ve{1.0, 0.0};
    for (int i = 0; i < 400; ++i) {
        const C ie = std::conj(s / ve);
        vm = 1.0 - z * (a * ie);
        ve = a * vm;
    }
    return {vm, ve};
}
inline constexpr double kC4VmMag = 0.972005339764310;
inline constexpr double kC4VeMag = 0.996305473258418;

// Feeder files matching the cases above (10 MVA base, so 1 pu = 10 MW).
inline const char* kC1Feeder = R"(
[base]
10.0
[buses]
S 13.8 1 1.0
L 13.8 0
[lines]
S L 0.01 0.02
[loads]
L 10.0 5.0 0 0 1 0 0 1
)";

inline const char* kC2Feeder = R"(
[base]
10.0
[buses]
S 13.8 1 1.05
L 13.8 0
[lines]
S L 0.03 0.06
[loads]
L 8.0 4.0 0.4 0.3 0.3 0.5 0.2 0.3
)";

inline const char* kC3Feeder = R"(
[base]
10.0
[buses]
S 13.8 1 1.02
A 13.8 0
B 13.8 0
[lines]
S A 0.02 0.04
A B 0.04 0.03
[loads]
A 5.0 2.0 0 0 1 0 0 1
B 6.0 3.0 1 0 0 1 0 0
)";

inline const char* kC4Feeder = R"(
[base]
10.0
[buses]
S 13.8 1 1.0
M 13.8 0
E 13.8 0
[lines]
S M 0.015 0.03
[svr]
M E 1.0 0.01 0.0 30.0 5.0
[loads]
E 9.0 4.5 0 0 1 0 0 1
)";

} // namespace oracles
