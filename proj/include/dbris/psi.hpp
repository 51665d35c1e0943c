// SPDX-License-Identifier: Apache-2.0
//
// Planar spiral inductor as a series element: L_V in series with the tank
// (L_S + R) || C_SP, placed between two 50 ohm ports.

#ifndef DBRIS_PSI_HPP
#define DBRIS_PSI_HPP

#include "dbris/field.hpp"

#include <vector>

namespace dbris
{

struct PsiCircuit
{
    double L_S = 0.0;  // H
    double C_SP = 0.0; // F
    double L_V = 0.0;  // H
    double R = 0.0;    // ohm, loss in the L_S branch

    void validate() const;
};

struct FrequencySweep
{
    double start_hz = 0.0;
    double stop_hz = 0.0;
    int points = 0;

    void validate() const;
    std::vector<double> frequencies() const;
};

double resonant_frequency(const PsiCircuit& c);

cplx tank_impedance(const PsiCircuit& c, double frequency_hz);
cplx series_impedance(const PsiCircuit& c, double frequency_hz);

// 2x2 ABCD matrix, row-major.
struct Abcd
{
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

    Abcd operator*(const Abcd& o) const;
};

Abcd series_abcd(cplx z);
cplx s21(const Abcd& m, double z0 = 50.0);
cplx s12(const Abcd& m, double z0 = 50.0);

// |S21| in dB, floored at kDbFloor.
double s21_db(cplx s);

std::vector<double> two_port_isolation(const PsiCircuit& c, const FrequencySweep& sweep);
std::vector<double> cascade(const PsiCircuit& c1, const PsiCircuit& c2, const FrequencySweep& sweep);
// Cascade of arbitrary series impedances at one frequency.
cplx cascade_s21(const std::vector<cplx>& series, double z0 = 50.0);

} // namespace dbris

#endif
