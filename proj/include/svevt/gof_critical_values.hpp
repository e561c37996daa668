// Generated by scripts/gen_gof_critical_values.py -- do not edit by hand.
//
// Asymptotic upper-tail critical points of the Cramer-von Mises (W2) and
// Anderson-Darling (A2) statistics for a generalized Pareto fit with both
// parameters estimated by maximum likelihood, tabulated against the shape
// xi. Linear interpolation in xi; clamped at the grid ends.
#pragma once

#include <array>

namespace svevt::gof_table {

inline constexpr int kNumXi = 14;
inline constexpr int kNumLevels = 4;

inline constexpr std::array<double, kNumXi> kXi = {
    -0.90, -0.70, -0.50, -0.30, -0.20, -0.10, 0.00, 0.10, 0.20, 0.30, 0.40, 0.50, 0.75, 1.00};

inline constexpr std::array<double, kNumLevels> kLevels = {0.25, 0.10, 0.05, 0.01};

inline constexpr std::array<std::array<double, kNumLevels>, kNumXi> kW2 = {{
    {0.1794, 0.2905, 0.3816, 0.6068},
    {0.1400, 0.2176, 0.2809, 0.4355},
    {0.1159, 0.1744, 0.2211, 0.3380},
    {0.0994, 0.1466, 0.1837, 0.2760},
    {0.0935, 0.1364, 0.1709, 0.2543},
    {0.0886, 0.1286, 0.1607, 0.2379},
    {0.0846, 0.1221, 0.1510, 0.2191},
    {0.0812, 0.1165, 0.1425, 0.2104},
    {0.0783, 0.1115, 0.1362, 0.2032},
    {0.0758, 0.1072, 0.1314, 0.1930},
    {0.0737, 0.1035, 0.1276, 0.1809},
    {0.0719, 0.1005, 0.1245, 0.1757},
    {0.0685, 0.0952, 0.1186, 0.1687},
    {0.0663, 0.0921, 0.1146, 0.1649},
}};

inline constexpr std::array<std::array<double, kNumLevels>, kNumXi> kA2 = {{
    {1.0733, 1.6269, 2.0758, 3.1864},
    {0.8671, 1.2768, 1.6055, 2.4160},
    {0.7354, 1.0613, 1.3206, 1.9580},
    {0.6494, 0.9236, 1.1404, 1.6716},
    {0.6175, 0.8730, 1.0744, 1.5672},
    {0.5910, 0.8310, 1.0197, 1.4809},
    {0.5687, 0.7959, 0.9740, 1.4087},
    {0.5500, 0.7662, 0.9354, 1.3476},
    {0.5341, 0.7410, 0.9026, 1.2957},
    {0.5205, 0.7196, 0.8746, 1.2513},
    {0.5090, 0.7011, 0.8505, 1.2130},
    {0.4991, 0.6853, 0.8297, 1.1798},
    {0.4799, 0.6545, 0.7893, 1.1149},
    {0.4668, 0.6332, 0.7611, 1.0691},
}};

}  // namespace svevt::gof_table
