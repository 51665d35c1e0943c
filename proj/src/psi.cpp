// SPDX-License-Identifier: Apache-2.0
#include "dbris/psi.hpp"

#include "dbris/error.hpp"

#include <cmath>

namespace dbris
{

void PsiCircuit::validate() const
{
    if (!(L_S > 0.0) || !(C_SP > 0.0) || !(L_V > 0.0) || !std::isfinite(L_S) || !std::isfinite(C_SP) ||
        !std::isfinite(L_V))
        throw Error(ErrorKind::InvalidInput, "circuit values must be positive");
    if (!(R >= 0.0) || !std::isfinite(R))
        throw Error(ErrorKind::InvalidInput, "series resistance must be non-negative");
}

void FrequencySweep::validate() const
{
    if (!(start_hz >= 0.0) || !(stop_hz > start_hz) || points < 2)
        throw Error(ErrorKind::InvalidInput, "sweep needs start < stop and at least two points");
}

std::vector<double> FrequencySweep::frequencies() const
{
    validate();
    std::vector<double> f(static_cast<std::size_t>(points));
    const double step = (stop_hz - start_hz) / (points - 1);
    for (int i = 0; i < points; ++i)
        f[static_cast<std::size_t>(i)] = start_hz + i * step;
    f.back() = stop_hz;
    return f;
}

double resonant_frequency(const PsiCircuit& c)
{
    c.validate();
    return 1.0 / (2.0 * kPi * std::sqrt(c.L_S * c.C_SP));
}

cplx tank_impedance(const PsiCircuit& c, double f)
{
    const double w = 2.0 * kPi * f;
    const cplx zl(c.R, w * c.L_S);
    const cplx den(1.0 - w * w * c.L_S * c.C_SP, w * c.R * c.C_SP);
    if (den == cplx(0.0))
        return {INFINITY, 0.0};
    return zl / den;
}

cplx series_impedance(const PsiCircuit& c, double f)
{
    return cplx(0.0, 2.0 * kPi * f * c.L_V) + tank_impedance(c, f);
}

Abcd Abcd::operator*(const Abcd& o) const
{
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

Abcd series_abcd(cplx z)
{
    return {1.0, z, 0.0, 1.0};
}

cplx s21(const Abcd& m, double z0)
{
    return 2.0 / (m.a + m.b / z0 + m.c * z0 + m.d);
}

cplx s12(const Abcd& m, double z0)
{
    return 2.0 * (m.a * m.d - m.b * m.c) / (m.a + m.b / z0 + m.c * z0 + m.d);
}

double s21_db(cplx s)
{
    const double a = std::abs(s);
    if (!std::isfinite(a) || a == 0.0)
        return kDbFloor;
    return std::max(kDbFloor, 20.0 * std::log10(a));
}

cplx cascade_s21(const std::vector<cplx>& series, double z0)
{
    Abcd m;
    for (const cplx& z : series)
    {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            return 0.0;
        m = m * series_abcd(z);
    }
    return s21(m, z0);
}

std::vector<double> two_port_isolation(const PsiCircuit& c, const FrequencySweep& sweep)
{
    c.validate();
    std::vector<double> out;
    for (double f : sweep.frequencies())
        out.push_back(s21_db(cascade_s21({series_impedance(c, f)})));
    return out;
}

std::vector<double> cascade(const PsiCircuit& c1, const PsiCircuit& c2, const FrequencySweep& sweep)
{
    c1.validate();
    c2.validate();
    std::vector<double> out;
    for (double f : sweep.frequencies())
        out.push_back(s21_db(cascade_s21({series_impedance(c1, f), series_impedance(c2, f)})));
    return out;
}

} // namespace dbris
