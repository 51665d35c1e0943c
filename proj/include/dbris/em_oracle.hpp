// SPDX-License-Identifier: Apache-2.0
//
// Synthetic multiport oracle: port geometry, coupling impedance matrix,
// embedded port patterns and incident-wave open-circuit voltages.

#ifndef DBRIS_EM_ORACLE_HPP
#define DBRIS_EM_ORACLE_HPP

#include "dbris/field.hpp"

#include <Eigen/Dense>

#include <vector>

namespace dbris
{

struct Position
{
    double x = 0.0;
    double y = 0.0;
};

// Coupling model shared by arrays and sub-wavelength element networks.
struct CouplingModel
{
    double element_exponent = 0.0; // cos^q element factor
    cplx self_impedance{50.0, 0.0};
    double coupling_strength = 0.1;
    double coupling_decay = 0.0; // 1/m
    // E_oc = a * cos^q(theta); zero keeps the open structure invisible.
    cplx open_circuit_amplitude{0.0, 0.0};

    void validate() const;
};

struct ArraySpec
{
    int rows = 1;
    int cols = 1;
    double spacing_m = 0.0;
    double frequency_hz = 0.0;
    CouplingModel coupling;

    void validate() const;
};

// rows x cols lattice centred on the origin, row-major (x runs along cols).
std::vector<Position> lattice_positions(int rows, int cols, double spacing_m);

struct PortNetwork
{
    Eigen::MatrixXcd Z;
    std::vector<Position> positions;
    std::vector<ComplexPattern> port_patterns;
    ComplexPattern oc_pattern;
    double frequency_hz = 0.0;
    double element_exponent = 0.0;

    std::size_t size() const { return positions.size(); }
    const AngleGrid& grid() const { return oc_pattern.grid(); }
};

struct IncidentWave
{
    Direction direction;
    cplx amplitude{1.0, 0.0};
    double frequency_hz = 0.0;
};

// Mutual impedance matrix only (no patterns).
Eigen::MatrixXcd coupling_matrix(const std::vector<Position>& positions, double frequency_hz,
                                 const CouplingModel& model);

// Throws NonPassive when min eig(Re Z) < -1e-9 max|Z|.
void check_passive(const Eigen::MatrixXcd& Z);

PortNetwork synthesize_network(const ArraySpec& spec, const AngleGrid& grid);
PortNetwork synthesize_network_at(const std::vector<Position>& positions, double frequency_hz,
                                  const CouplingModel& model, const AngleGrid& grid);

// E_m at one direction for every port.
Eigen::VectorXcd port_pattern_values(const std::vector<Position>& positions, double frequency_hz,
                                     double element_exponent, const Direction& d);
double element_factor(double element_exponent, double theta_deg);

Eigen::VectorXcd open_circuit_voltages(const PortNetwork& net, const IncidentWave& wave);
Eigen::VectorXcd open_circuit_voltages(const std::vector<Position>& positions, double element_exponent,
                                       const IncidentWave& wave);

} // namespace dbris

#endif
