#pragma once

// Reference values for the test suite, frozen from an independent
// high-precision computation (40-digit working precision).  Each constant is
// quoted to 17 significant digits.  Associated Legendre reference values use
// the type-3 (cut along (-inf, 1]) convention matching the library.

#include <complex>

namespace refs {

using C = std::complex<double>;

// Gauss hypergeometric 2F1(0.7, 1.2; 1.5; 0.3).
inline constexpr double kH2F1 = 1.2183000191395283;
// int_0^{2pi} sqrt(1 - cos w / cosh 1) dw.
inline constexpr double kQuadPeriodic = 6.0980788601924257;
// int_{-1}^{1} (1 - cosh w / cosh 1)^{-0.4} dw  (both endpoints singular).
inline constexpr double kQuadFinite = 4.1532371246156069;
// int_1^inf e^{-i w (2-i)} (cosh w / cosh 1 - 1)^{0.3} dw.
inline const C kQuadSemi{-0.10323665612446071, 0.043421902063652253};
// sin(1 - 1.5i) / (1 - 1.5i): shifted sinc at tau=1+0.5i, shift=2i, chi=1.
inline const C kSinc{1.1400511799225782, 0.55962217045848136};

// Offset-index coefficient integral, K=0.7, n=2, chi=0.5 (literal form).
inline const C kRtilde{-0.32107656463959432, 0.23327577895652752};

// Fourier coefficients a_n of (1 - cos w / cosh chi)^K at K=0.5, chi=1.
inline constexpr double kA05[6] = {
    0.97053939396381549,     -0.16965690764758679,   -0.015327552210140426,
    -0.0027937549013016372,  -0.00063880137877816344, -0.00016388891698778157};

// Scaled coefficients rho_n = a_n e^{n chi}.
inline constexpr double kRho_K05_chi1_n10 = -0.008178625173896327;
inline constexpr double kRho_K05_chi1_n40 = -0.00098517058749111336;
inline constexpr double kRho_K13_chi05_n10 = 0.00075209676203914443;
inline constexpr double kRho_K13_chi05_n60 = 9.4493742517285538e-6;

// Scaled branch coefficients etilde_n = d_n e^{-n chi} at K=0.5, chi=1.
inline constexpr double kEtilde_K05_chi1_n10 = -0.0085024941441408974;
inline constexpr double kEtilde_K05_chi1_n40 = -0.0010435301782749103;

// P^{-1/2-K}_{-1/2+i tau}(cosh chi) spot values.
inline constexpr double kP_K05_t2_chi1 = 0.2565605423358986;
inline constexpr double kP_K05_t1_chi1 = 0.39361887286824493;
inline constexpr double kP_K05_t0_chi05 = 0.24301029302185714;
inline constexpr double kP_K17_t13_chi08 = 0.044422328985752112;
inline constexpr double kP_K17_t0_chi1 = 0.074000435730145686;
inline constexpr double kP_L5_t2_chi1 = 4.1830600470528967e-5;

// P grid over K in {0.5, 1.3, 2.7} x tau in {0.7, 2} x chi in {0.5, 1, 3},
// order [K][tau][chi].
inline constexpr double kPGrid[3][2][3] = {
    {{0.23929864720334866, 0.42069561090219184, 0.35000229766729491},
     {0.21380029648752801, 0.2565605423358986, -0.067000984071839628}},
    {{0.046624892913202264, 0.13890692775216796, 0.24352000848368223},
     {0.043045273109183161, 0.09883834858508034, -0.042297328932144447}},
    {{0.0014137226630726818, 0.010415026770198337, 0.055850303532093605},
     {0.0013406422504052016, 0.0083322384942457427, -0.0043597167236210792}}};

// Q^{-1/2-K}_{-1/2+i tau}(cosh chi), plus branch, spot values at complex tau.
inline const C kQ_K0_t1m05i_chi1{-0.53912198414465881, 0.32049840484401691};
inline const C kQ_K03_t2m1i_chi1{0.15242777567291059, 0.035718246586973376};
inline const C kQ_K05_t2m01i_chi1{0.075259109324648664, -0.36297040760324965};

// Q grid at tau = t - i(K + 0.5), same (K, t, chi) ordering as kPGrid.
inline const C kQGrid[3][2][3] = {
    {{C{0.03388727611561759, 1.2002242138606739},
      C{0.14645244632079833, 0.40679554591150729},
      C{0.018844664741049485, -0.0030117100433843053}},
     {C{0.3602388542339472, 0.082493206122831097},
      C{0.10453109577349178, -0.090803642979045498},
      C{-0.00015082687827148298, 0.0062353736284258762}}},
    {{C{0.16778498417996026, -0.6088487142826908},
      C{-0.0019770398699092104, -0.12174519790607519},
      C{-0.00096652035606862084, -0.0001848120620196051}},
     {C{-0.14455819075087241, -0.010413914587848488},
      C{-0.021277410654155912, 0.021030235991122615},
      C{1.1230781652092318e-6, -0.00025159894721473761}}},
    {{C{0.1181720513104029, 0.025950808101143833},
      C{0.007566565538629749, -0.00032628430018027139},
      C{5.4914547484600244e-7, -3.0309383009416719e-6}},
     {C{-0.012231915454475462, -0.018357552070765481},
      C{-0.0014401269256407374, -0.00032475457298903038},
      C{5.4948273749002572e-7, -3.0706006419494463e-7}}}};

// Large-argument Q values.
inline const C kQ_K0_t1_chi8{0.0047234587542869419, 0.032118156599785899};
inline const C kQ_K05_t2_chi10{0.0034990074311338464, -0.0021299307055400472};

// Degree-shifted targets Q^{-1/2-K}_{-1/2+K+i tau}.
inline const C kQshift_K05_t1m02i_chi1{0.47403418675428955,
                                       0.16952278704704163};
inline const C kQshift_K05_t2m02i_chi2{-0.052901852927260756,
                                       -0.013335030452479664};

// Residues of the plus-branch Q series at tau = i(n-K), chi = 1, computed
// by four-direction contour sampling at radius 0.005 (error O(radius^4)).
inline const C kRes_K05_chi1[3] = {C{0.0, 0.85091812909500968},
                                   C{0.0, -1.3130352856077754},
                                   C{0.0, -0.5876005953668407}};
inline const C kRes_K13_chi1[3] = {C{0.19176705466989945, -0.26394470698965673},
                                   C{-0.76937127265943378, 1.0589487098183424},
                                   C{0.60545774424099329, -0.83334109278256296}};

// Legendre polynomial P_5(0.7).
inline constexpr double kLegendreP5 = -0.36519875;

}  // namespace refs
