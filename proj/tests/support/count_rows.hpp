// Published detection counts with their printed rates (3 decimals).
#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace cases {

inline constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

struct CountRow {
    std::size_t tp, fp, tn, fn;
    double tpr, fpr, f1, precision; // kAbsent where the ratio is undefined
};

// Aggregate rows at epsilon 0.05 and 0.01 for three reconstructor families.
inline std::vector<CountRow> aggregate_rows() {
    return {
        {405, 1027, 7622, 121, 0.770, 0.119, 0.414, 0.283},
        {294, 619, 11208, 232, 0.559, 0.052, 0.409, 0.322},
        {381, 898, 7553, 145, 0.724, 0.106, 0.422, 0.298},
        {314, 598, 10680, 212, 0.597, 0.053, 0.437, 0.344},
        {172, 1246, 11651, 354, 0.327, 0.097, 0.177, 0.121},
        {110, 909, 13442, 416, 0.209, 0.063, 0.142, 0.108},
    };
}

// Every row whose printed rates survive a single rounding of the counts.
inline std::vector<CountRow> all_consistent_rows() {
    return {
        {149, 304, 1970, 47, 0.760, 0.134, 0.459, 0.329},
        {107, 183, 2959, 89, 0.546, 0.058, 0.440, 0.369},
        {104, 210, 2679, 92, 0.531, 0.073, 0.408, 0.331},
        {21, 55, 4063, 175, 0.107, 0.013, 0.154, 0.276},
        {138, 260, 1877, 58, 0.704, 0.122, 0.465, 0.347},
        {108, 183, 2665, 88, 0.551, 0.064, 0.444, 0.371},
        {6, 22, 4208, 190, 0.031, 0.005, 0.054, 0.214},
        {0, 0, 4282, 196, 0, 0, kAbsent, kAbsent},
        {16, 34, 3990, 177, 0.083, 0.008, 0.132, 0.320},
        {7, 12, 4119, 186, 0.036, 0.003, 0.066, 0.368},
        {65, 344, 3170, 131, 0.332, 0.098, 0.215, 0.159},
        {158, 331, 1952, 51, 0.756, 0.145, 0.453, 0.323},
        {112, 188, 2720, 97, 0.536, 0.065, 0.440, 0.373},
        {24, 34, 3653, 185, 0.115, 0.009, 0.180, 0.414},
        {147, 284, 2026, 62, 0.703, 0.123, 0.459, 0.341},
        {120, 175, 2838, 89, 0.574, 0.058, 0.476, 0.407},
        {6, 23, 3661, 203, 0.029, 0.006, 0.050, 0.207},
        {0, 0, 3731, 209, 0, 0, kAbsent, kAbsent},
        {23, 34, 3503, 175, 0.116, 0.010, 0.180, 0.404},
        {7, 13, 3592, 191, 0.035, 0.004, 0.064, 0.350},
        {70, 308, 2917, 139, 0.335, 0.096, 0.239, 0.185},
        {43, 201, 3240, 166, 0.206, 0.058, 0.190, 0.176},
        {98, 392, 3700, 23, 0.810, 0.096, 0.321, 0.200},
        {81, 267, 5391, 40, 0.669, 0.047, 0.345, 0.233},
        {78, 281, 5045, 43, 0.645, 0.053, 0.325, 0.217},
        {13, 95, 7730, 108, 0.107, 0.012, 0.114, 0.120},
        {96, 354, 3650, 25, 0.793, 0.088, 0.336, 0.213},
        {86, 240, 5177, 35, 0.711, 0.044, 0.385, 0.264},
        {7, 34, 8127, 114, 0.058, 0.004, 0.086, 0.171},
        {0, 0, 8229, 121, 0, 0, kAbsent, kAbsent},
        {11, 41, 7879, 111, 0.090, 0.005, 0.126, 0.212},
        {23, 458, 6551, 98, 0.190, 0.065, 0.076, 0.048},
        {405, 1027, 7622, 121, 0.770, 0.119, 0.414, 0.283},
        {294, 619, 11208, 232, 0.559, 0.052, 0.409, 0.322},
        {294, 679, 10444, 232, 0.559, 0.061, 0.392, 0.302},
        {58, 184, 15446, 468, 0.110, 0.012, 0.151, 0.240},
        {381, 898, 7553, 145, 0.724, 0.106, 0.422, 0.298},
        {314, 598, 10680, 212, 0.597, 0.053, 0.437, 0.344},
        {19, 79, 15996, 507, 0.036, 0.005, 0.061, 0.194},
        {0, 0, 16242, 526, 0, 0, kAbsent, kAbsent},
        {18, 37, 15746, 495, 0.035, 0.002, 0.063, 0.327},
        {172, 1246, 11651, 354, 0.327, 0.097, 0.177, 0.121},
        {110, 909, 13442, 416, 0.209, 0.063, 0.142, 0.108},
    };
}

} // namespace cases
