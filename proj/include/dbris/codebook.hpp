// SPDX-License-Identifier: Apache-2.0
//
// Discrete beam steering: ideal phase profile, nearest-phase quantisation,
// greedy refinement on |E_s(target)|^2 and per-target steering reports.

#ifndef DBRIS_CODEBOOK_HPP
#define DBRIS_CODEBOOK_HPP

#include "dbris/em_oracle.hpp"
#include "dbris/field.hpp"
#include "dbris/thevenin.hpp"

#include <string>
#include <vector>

namespace dbris
{

// Reflection phase of every available element state and the load realising it.
struct StateAlphabet
{
    std::vector<double> phases_deg;
    std::vector<LoadModel> loads;

    std::size_t size() const { return loads.size(); }
};

// Measured 1-bit shifter: phases {0, 180}.
StateAlphabet one_bit_alphabet();
// Loads with reflection magnitude*exp(j phase) against z0.
StateAlphabet reflective_alphabet(const std::vector<double>& phases_deg, double magnitude = 0.9, double z0 = 50.0);

// Array whose open-circuit pattern is the matched-reference re-radiation
// sum_n v_n E_n / (2 z0) of the design wave, so a port loaded with
// reflection Gamma contributes v E Gamma / (2 z0).
PortNetwork reflective_array_network(const ArraySpec& spec, const AngleGrid& grid, const IncidentWave& design,
                                     double z0 = 50.0);

struct SteeringTarget
{
    Direction beam;
    IncidentWave incident;
};

// phi_n = -k r_n . (u_beam - u_inc), degrees in [0, 360). The profile is
// uniform when the beam points at (theta_inc, phi_inc).
std::vector<double> ideal_phase_profile(const SteeringTarget& target, const std::vector<Position>& positions,
                                        double frequency_hz);

// Nearest state by wrapped phase distance, ties to the lower index.
std::vector<int> quantize_states(const std::vector<double>& profile, const std::vector<double>& phases_deg);

StateVector states_from_indices(const std::vector<int>& idx, const StateAlphabet& alphabet);

struct SteeringCodebook
{
    std::vector<int> states;
    PatternMetrics metrics;
    std::string method;     // quantized, quantized+greedy or exhaustive
    int accepted_flips = 0; // exhaustive: elements changed from the initial codebook
    double objective = 0.0; // |E_s(target)|^2
};

// |E_s(target)|^2 for a state assignment; target must be on the grid.
double steering_objective(const PortNetwork& net, const StateAlphabet& alphabet, const std::vector<int>& states,
                          const SteeringTarget& target, const LoadConstants& k = {});

// Arrays with at most this many joint states are refined exhaustively.
inline constexpr double kExhaustiveStates = 4096.0;

// Steepest single-element ascent: every step tries every alternative state of
// every element and takes the best strict improvement. Small state spaces are
// enumerated instead, limited to codebooks within budget changes.
SteeringCodebook refine_codebook(const PortNetwork& net, const StateAlphabet& alphabet, const std::vector<int>& initial,
                                 const SteeringTarget& target, int budget, double cut_phi_deg,
                                 const LoadConstants& k = {});

struct SteeringRow
{
    Direction target;
    bool ok = false;
    std::string error;
    double achieved_theta = 0.0;
    double pointing_error = 0.0;
    double sll_db = 0.0;
    double peak_rel_db = 0.0;
    SteeringCodebook codebook;
};

// Quantise + refine for every target on the phi = cut_phi plane. Targets off
// the grid produce an error row instead of failing the report.
std::vector<SteeringRow> steering_report(const PortNetwork& net, const StateAlphabet& alphabet,
                                         const std::vector<Direction>& targets, const IncidentWave& wave,
                                         double cut_phi_deg, int budget, const LoadConstants& k = {});

} // namespace dbris

#endif
