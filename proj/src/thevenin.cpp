// SPDX-License-Identifier: Apache-2.0
#include "dbris/thevenin.hpp"

#include "dbris/error.hpp"

#include <cmath>
#include <cstdio>

namespace dbris
{

namespace
{

constexpr double kMaxCondition = 1e12;

} // namespace

LoadModel LoadModel::fixed(cplx z)
{
    if (!(z.real() >= 0.0) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw Error(ErrorKind::InvalidInput, "load impedance needs a finite non-negative real part");
    return {Kind::Impedance, z, 0};
}

LoadModel LoadModel::shifter(int state)
{
    if (state != 0 && state != 1)
        throw Error(ErrorKind::InvalidInput, "1-bit shifter state must be 0 or 1");
    return {Kind::OneBitShifter, {}, state};
}

cplx impedance_from_reflection(cplx gamma, double z0)
{
    return z0 * (1.0 + gamma) / (1.0 - gamma);
}

cplx shifter_reflection(int state)
{
    // Measured shifter: -2.2 dB at 0 deg, -1 dB at 180 deg.
    return state == 0 ? cplx(std::pow(10.0, -2.2 / 20.0), 0.0) : cplx(-std::pow(10.0, -1.0 / 20.0), 0.0);
}

cplx load_impedance(const LoadModel& load, const LoadConstants& k)
{
    switch (load.kind)
    {
    case LoadModel::Kind::Open:
        return k.open_ohm;
    case LoadModel::Kind::Short:
        return 0.0;
    case LoadModel::Kind::Impedance:
        return load.impedance;
    case LoadModel::Kind::OneBitShifter:
        return impedance_from_reflection(shifter_reflection(load.state), k.z0);
    case LoadModel::Kind::DiodeSwitch:
        return load.state ? cplx(k.diode_on_ohm) : cplx(k.open_ohm);
    }
    return k.open_ohm;
}

Eigen::VectorXcd load_matrix(const StateVector& states, const LoadConstants& k)
{
    Eigen::VectorXcd zl(static_cast<Eigen::Index>(states.size()));
    for (std::size_t m = 0; m < states.size(); ++m)
        zl(static_cast<Eigen::Index>(m)) = load_impedance(states[m], k);
    return zl;
}

Eigen::VectorXcd port_currents(const Eigen::MatrixXcd& Z, const Eigen::VectorXcd& zl, const Eigen::VectorXcd& v_oc)
{
    const auto m = Z.rows();
    if (Z.cols() != m || zl.size() != m || v_oc.size() != m)
        throw Error(ErrorKind::InvalidInput, "port dimension mismatch");
    Eigen::MatrixXcd A = Z;
    A.diagonal() += zl;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const double rc = lu.rcond();
    if (!(rc * kMaxCondition > 1.0))
    {
        char buf[128];
        std::snprintf(buf, sizeof buf, "singular network: condition estimate %.3g", rc > 0.0 ? 1.0 / rc : INFINITY);
        throw Error(ErrorKind::SingularNetwork, buf);
    }
    return lu.solve(-v_oc);
}

ComplexPattern superpose(const PortNetwork& net, const Eigen::VectorXcd& currents)
{
    if (static_cast<std::size_t>(currents.size()) != net.size())
        throw Error(ErrorKind::InvalidInput, "current vector length differs from port count");
    std::vector<cplx> out(net.oc_pattern.values().begin(), net.oc_pattern.values().end());
    for (std::size_t m = 0; m < net.size(); ++m)
    {
        const cplx im = currents(static_cast<Eigen::Index>(m));
        const auto e = net.port_patterns[m].values();
        for (std::size_t g = 0; g < out.size(); ++g)
            out[g] += im * e[g];
    }
    return ComplexPattern(net.grid(), std::move(out));
}

ScatterResult scattered_pattern(const PortNetwork& net, const StateVector& states, const IncidentWave& wave,
                                const LoadConstants& k)
{
    if (states.size() != net.size())
        throw Error(ErrorKind::InvalidInput, "state vector length differs from port count");
    auto i = port_currents(net.Z, load_matrix(states, k), open_circuit_voltages(net, wave));
    auto p = superpose(net, i);
    return {std::move(i), std::move(p)};
}

} // namespace dbris
