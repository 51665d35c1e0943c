// SPDX-License-Identifier: Apache-2.0
#include "dbris/measurement.hpp"

#include "dbris/error.hpp"

#include <algorithm>
#include <cmath>

namespace dbris
{

namespace
{

constexpr double kLobeDb = -10.0;

struct Overlap
{
    std::vector<double> theta;
    std::vector<cplx> a;
    std::vector<cplx> b;
};

Overlap overlap(const std::vector<double>& ta, const std::vector<cplx>& a, const std::vector<double>& tb,
                const std::vector<cplx>& b)
{
    if (ta.size() != a.size() || tb.size() != b.size())
        throw Error(ErrorKind::InvalidInput, "angle and value counts differ");
    Overlap o;
    for (std::size_t i = 0; i < ta.size(); ++i)
    {
        for (std::size_t j = 0; j < tb.size(); ++j)
        {
            if (std::abs(ta[i] - tb[j]) <= 1e-9)
            {
                o.theta.push_back(ta[i]);
                o.a.push_back(a[i]);
                o.b.push_back(b[j]);
                break;
            }
        }
    }
    if (o.theta.empty())
        throw Error(ErrorKind::EmptyOverlap, "empty overlap between pattern and trace angles");
    return o;
}

std::size_t argmax_abs(const std::vector<cplx>& v)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[best]))
            best = i;
    return best;
}

} // namespace

const char* to_string(TraceLabel l)
{
    switch (l)
    {
    case TraceLabel::Env:
        return "env";
    case TraceLabel::Total:
        return "total";
    case TraceLabel::Scat:
        return "scat";
    }
    return "total";
}

TraceLabel parse_trace_label(const std::string& s)
{
    if (s == "env")
        return TraceLabel::Env;
    if (s == "total")
        return TraceLabel::Total;
    if (s == "scat")
        return TraceLabel::Scat;
    throw Error(ErrorKind::Parse, "unknown trace label '" + s + "'");
}

void S21Trace::validate() const
{
    if (theta_deg.empty() || theta_deg.size() != values.size())
        throw Error(ErrorKind::InvalidInput, "trace needs one value per angle");
    for (std::size_t i = 0; i < theta_deg.size(); ++i)
    {
        if (!std::isfinite(theta_deg[i]) || !std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
            throw Error(ErrorKind::InvalidInput, "trace contains non-finite samples");
        if (i > 0 && !(theta_deg[i] > theta_deg[i - 1]))
            throw Error(ErrorKind::InvalidInput, "trace angles must be strictly increasing");
    }
    if (!(frequency_hz > 0.0))
        throw Error(ErrorKind::InvalidInput, "trace frequency must be positive");
}

S21Trace background_subtract(const S21Trace& total, const S21Trace& env)
{
    total.validate();
    env.validate();
    if (total.theta_deg != env.theta_deg || total.phi_deg != env.phi_deg || total.frequency_hz != env.frequency_hz)
        throw Error(ErrorKind::IncompatibleTraces, "incompatible traces: grids or frequencies differ");
    S21Trace out = total;
    out.label = TraceLabel::Scat;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = total.values[i] - env.values[i];
    return out;
}

CompareResult pattern_compare(const std::vector<double>& theta_a, const std::vector<cplx>& a,
                              const std::vector<double>& theta_b, const std::vector<cplx>& b)
{
    const auto o = overlap(theta_a, a, theta_b, b);
    const auto da = magnitude_db(o.a);
    const auto db = magnitude_db(o.b);

    CompareResult r;
    r.peak_offset_deg = std::abs(o.theta[argmax_abs(o.a)] - o.theta[argmax_abs(o.b)]);
    double acc = 0.0;
    for (std::size_t i = 0; i < o.theta.size(); ++i)
    {
        if (std::max(da[i], db[i]) < kLobeDb)
            continue;
        const double d = da[i] - db[i];
        acc += d * d;
        ++r.points;
    }
    r.rms_db = r.points ? std::sqrt(acc / static_cast<double>(r.points)) : 0.0;
    return r;
}

CompareResult pattern_compare(const ComplexPattern& p, double cut_phi_deg, const S21Trace& trace)
{
    trace.validate();
    const auto cut = p.cut(cut_phi_deg);
    const auto th = p.grid().theta();
    return pattern_compare(std::vector<double>(th.begin(), th.end()), cut, trace.theta_deg, trace.values);
}

} // namespace dbris
