// SPDX-License-Identifier: Apache-2.0
//
// Entropy of the gaps between sorted reflection phases of a 2^Q-state element.

#ifndef DBRIS_PHASE_ENTROPY_HPP
#define DBRIS_PHASE_ENTROPY_HPP

#include <vector>

namespace dbris
{

class PhaseSet
{
public:
    // Phases in degrees, each in [0, 360); length must be a power of two.
    explicit PhaseSet(std::vector<double> phases_deg);

    // Folds arbitrary angles into [0, 360) first.
    static PhaseSet wrapped(const std::vector<double>& phases_deg);

    const std::vector<double>& phases() const { return phases_; }
    int bits() const; // Q

private:
    std::vector<double> phases_;
};

double wrap_degrees(double deg);

// Ascending gaps, last one wraps around: 360 + phi_1 - phi_last.
std::vector<double> phase_gaps(const PhaseSet& s);

// Bits; 0 log 0 = 0.
double entropy(const PhaseSet& s);

} // namespace dbris

#endif
