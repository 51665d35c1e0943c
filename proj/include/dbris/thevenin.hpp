// SPDX-License-Identifier: Apache-2.0
//
// Port loads, port currents i = -(Z + Z_L)^-1 v_oc and the scattered
// pattern E_s = sum_m i_m E_m + E_oc.

#ifndef DBRIS_THEVENIN_HPP
#define DBRIS_THEVENIN_HPP

#include "dbris/em_oracle.hpp"

#include <Eigen/Dense>

#include <vector>

namespace dbris
{

struct LoadConstants
{
    double open_ohm = 1e9;
    double diode_on_ohm = 1.0;
    double z0 = 50.0;
};

struct LoadModel
{
    enum class Kind
    {
        Open,
        Short,
        Impedance,
        OneBitShifter,
        DiodeSwitch
    };

    Kind kind = Kind::Open;
    cplx impedance{0.0, 0.0}; // Kind::Impedance only
    int state = 0;            // shifter 0|1, diode 1 = on

    static LoadModel open() { return {Kind::Open, {}, 0}; }
    static LoadModel shorted() { return {Kind::Short, {}, 0}; }
    static LoadModel fixed(cplx z);
    static LoadModel shifter(int state);
    static LoadModel diode(bool on) { return {Kind::DiodeSwitch, {}, on ? 1 : 0}; }

    bool operator==(const LoadModel&) const = default;
};

using StateVector = std::vector<LoadModel>;

// Z = z0 (1 + gamma) / (1 - gamma)
cplx impedance_from_reflection(cplx gamma, double z0 = 50.0);
cplx shifter_reflection(int state);

cplx load_impedance(const LoadModel& load, const LoadConstants& k = {});
// Diagonal of Z_L.
Eigen::VectorXcd load_matrix(const StateVector& states, const LoadConstants& k = {});

// Solves (Z + diag(zl)) i = -v_oc by LU with partial pivoting.
// Throws SingularNetwork when the estimated condition number exceeds 1e12.
Eigen::VectorXcd port_currents(const Eigen::MatrixXcd& Z, const Eigen::VectorXcd& zl, const Eigen::VectorXcd& v_oc);

struct ScatterResult
{
    Eigen::VectorXcd currents;
    ComplexPattern pattern;
};

// sum_m i_m E_m + E_oc on the network grid.
ComplexPattern superpose(const PortNetwork& net, const Eigen::VectorXcd& currents);

ScatterResult scattered_pattern(const PortNetwork& net, const StateVector& states, const IncidentWave& wave,
                                const LoadConstants& k = {});

} // namespace dbris

#endif
