// SPDX-License-Identifier: Apache-2.0
//
// Single-cut S21 traces, complex background subtraction and
// simulated-vs-measured comparison.

#ifndef DBRIS_MEASUREMENT_HPP
#define DBRIS_MEASUREMENT_HPP

#include "dbris/field.hpp"

#include <string>
#include <vector>

namespace dbris
{

enum class TraceLabel
{
    Env,
    Total,
    Scat
};

const char* to_string(TraceLabel l);
TraceLabel parse_trace_label(const std::string& s);

struct S21Trace
{
    std::vector<double> theta_deg;
    std::vector<cplx> values;
    double phi_deg = 0.0;
    double frequency_hz = 0.0;
    TraceLabel label = TraceLabel::Total;

    void validate() const;
};

// scat = total - env, pointwise and complex.
S21Trace background_subtract(const S21Trace& total, const S21Trace& env);

struct CompareResult
{
    double peak_offset_deg = 0.0;
    double rms_db = 0.0;
    std::size_t points = 0; // samples inside the main-lobe region
};

// Both inputs are normalised to their own peak over the shared angles. The
// RMS covers samples where either curve is within 10 dB of its peak.
CompareResult pattern_compare(const std::vector<double>& theta_a, const std::vector<cplx>& a,
                              const std::vector<double>& theta_b, const std::vector<cplx>& b);
CompareResult pattern_compare(const ComplexPattern& p, double cut_phi_deg, const S21Trace& trace);

} // namespace dbris

#endif
