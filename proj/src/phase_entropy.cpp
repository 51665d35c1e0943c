// SPDX-License-Identifier: Apache-2.0
#include "dbris/phase_entropy.hpp"

#include "dbris/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace dbris
{

PhaseSet::PhaseSet(std::vector<double> phases_deg) : phases_(std::move(phases_deg))
{
    if (phases_.empty() || !std::has_single_bit(phases_.size()))
        throw Error(ErrorKind::InvalidInput, "phase set length must be a power of two");
    for (double p : phases_)
    {
        if (!(p >= 0.0 && p < 360.0))
            throw Error(ErrorKind::InvalidInput, "phase outside [0, 360)");
    }
}

PhaseSet PhaseSet::wrapped(const std::vector<double>& phases_deg)
{
    std::vector<double> w(phases_deg.size());
    std::transform(phases_deg.begin(), phases_deg.end(), w.begin(), wrap_degrees);
    return PhaseSet(std::move(w));
}

int PhaseSet::bits() const
{
    return std::countr_zero(phases_.size());
}

double wrap_degrees(double deg)
{
    double w = std::fmod(deg, 360.0);
    if (w < 0.0)
        w += 360.0;
    // fmod of a tiny negative can round up to exactly 360.
    return w >= 360.0 ? 0.0 : w;
}

std::vector<double> phase_gaps(const PhaseSet& s)
{
    std::vector<double> p = s.phases();
    std::stable_sort(p.begin(), p.end());
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        g[i] = p[i + 1] - p[i];
    g.back() = 360.0 + p.front() - p.back();
    return g;
}

double entropy(const PhaseSet& s)
{
    double h = 0.0;
    for (double gap : phase_gaps(s))
    {
        const double q = gap / 360.0;
        if (q > 0.0)
            h -= q * std::log2(q);
    }
    // rounding can push a hair outside [0, Q]
    return std::clamp(h, 0.0, static_cast<double>(s.bits()));
}

} // namespace dbris
