// SPDX-License-Identifier: Apache-2.0
#include "dbris/em_oracle.hpp"

#include "dbris/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>

namespace dbris
{

namespace
{

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

} // namespace

void CouplingModel::validate() const
{
    if (!(element_exponent >= 0.0) || !std::isfinite(element_exponent))
        throw Error(ErrorKind::InvalidInput, "element exponent must be >= 0");
    if (!finite(self_impedance) || !finite(open_circuit_amplitude))
        throw Error(ErrorKind::InvalidInput, "impedances must be finite");
    if (!std::isfinite(coupling_strength) || !(coupling_decay >= 0.0) || !std::isfinite(coupling_decay))
        throw Error(ErrorKind::InvalidInput, "invalid coupling parameters");
}

void ArraySpec::validate() const
{
    if (rows < 1 || cols < 1)
        throw Error(ErrorKind::InvalidInput, "array needs at least one element");
    if (!(spacing_m > 0.0) || !std::isfinite(spacing_m))
        throw Error(ErrorKind::InvalidInput, "spacing must be positive");
    if (!(frequency_hz > 0.0) || !std::isfinite(frequency_hz))
        throw Error(ErrorKind::InvalidInput, "frequency must be positive");
    coupling.validate();
}

std::vector<Position> lattice_positions(int rows, int cols, double spacing_m)
{
    std::vector<Position> out;
    out.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    const double cx = 0.5 * (cols - 1);
    const double cy = 0.5 * (rows - 1);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            out.push_back({(c - cx) * spacing_m, (r - cy) * spacing_m});
    return out;
}

double element_factor(double q, double theta_deg)
{
    if (q == 0.0)
        return 1.0;
    const double c = std::cos(deg2rad(theta_deg));
    return c <= 0.0 ? 0.0 : std::pow(c, q);
}

Eigen::MatrixXcd coupling_matrix(const std::vector<Position>& positions, double frequency_hz,
                                 const CouplingModel& model)
{
    const auto m = static_cast<Eigen::Index>(positions.size());
    const double k = wavenumber(frequency_hz);
    Eigen::MatrixXcd Z(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
    {
        Z(a, a) = model.self_impedance;
        for (Eigen::Index b = a + 1; b < m; ++b)
        {
            const double d = std::hypot(positions[a].x - positions[b].x, positions[a].y - positions[b].y);
            const double kd = k * d;
            const cplx z = model.coupling_strength * model.self_impedance * std::exp(-model.coupling_decay * d) *
                           std::exp(cplx(0.0, -kd)) / std::max(kd, 1.0);
            Z(a, b) = z;
            Z(b, a) = z;
        }
    }
    return Z;
}

void check_passive(const Eigen::MatrixXcd& Z)
{
    if (Z.size() == 0)
        return;
    const Eigen::MatrixXd R = 0.5 * (Z.real() + Z.real().transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double scale = Z.cwiseAbs().maxCoeff();
    if (lo < -1e-9 * scale)
    {
        char buf[128];
        std::snprintf(buf, sizeof buf, "non-passive network: min eigenvalue of Re(Z) = %.6g ohm", lo);
        throw Error(ErrorKind::NonPassive, buf);
    }
}

Eigen::VectorXcd port_pattern_values(const std::vector<Position>& positions, double frequency_hz,
                                     double element_exponent, const Direction& d)
{
    const double k = wavenumber(frequency_hz);
    const auto u = transverse(d);
    const double ef = element_factor(element_exponent, d.theta_deg);
    Eigen::VectorXcd out(static_cast<Eigen::Index>(positions.size()));
    for (std::size_t m = 0; m < positions.size(); ++m)
        out(static_cast<Eigen::Index>(m)) = ef * std::exp(cplx(0.0, k * (positions[m].x * u.ux + positions[m].y * u.uy)));
    return out;
}

PortNetwork synthesize_network_at(const std::vector<Position>& positions, double frequency_hz,
                                  const CouplingModel& model, const AngleGrid& grid)
{
    model.validate();
    if (positions.empty())
        throw Error(ErrorKind::InvalidInput, "network needs at least one port");
    if (!(frequency_hz > 0.0))
        throw Error(ErrorKind::InvalidInput, "frequency must be positive");

    Eigen::MatrixXcd Z = coupling_matrix(positions, frequency_hz, model);
    check_passive(Z);

    const std::size_t npts = grid.size();
    std::vector<std::vector<cplx>> cols(positions.size(), std::vector<cplx>(npts));
    std::vector<cplx> oc(npts);
    for (std::size_t g = 0; g < npts; ++g)
    {
        const Direction d = grid.direction(g);
        const auto e = port_pattern_values(positions, frequency_hz, model.element_exponent, d);
        for (std::size_t m = 0; m < positions.size(); ++m)
            cols[m][g] = e(static_cast<Eigen::Index>(m));
        oc[g] = model.open_circuit_amplitude * element_factor(model.element_exponent, d.theta_deg);
    }

    std::vector<ComplexPattern> patterns;
    patterns.reserve(positions.size());
    for (auto& c : cols)
        patterns.emplace_back(grid, std::move(c));

    return PortNetwork{std::move(Z), positions, std::move(patterns), ComplexPattern(grid, std::move(oc)),
                       frequency_hz, model.element_exponent};
}

PortNetwork synthesize_network(const ArraySpec& spec, const AngleGrid& grid)
{
    spec.validate();
    return synthesize_network_at(lattice_positions(spec.rows, spec.cols, spec.spacing_m), spec.frequency_hz,
                                 spec.coupling, grid);
}

Eigen::VectorXcd open_circuit_voltages(const std::vector<Position>& positions, double element_exponent,
                                       const IncidentWave& wave)
{
    if (wave.direction.theta_deg < -90.0 || wave.direction.theta_deg > 90.0)
        throw Error(ErrorKind::InvalidInput, "incident direction outside theta range");
    // Reciprocity: the embedded pattern with its phase progression conjugated.
    return wave.amplitude *
           port_pattern_values(positions, wave.frequency_hz, element_exponent, wave.direction).conjugate();
}

Eigen::VectorXcd open_circuit_voltages(const PortNetwork& net, const IncidentWave& wave)
{
    if (std::abs(wave.frequency_hz - net.frequency_hz) > 1e-9 * net.frequency_hz)
        throw Error(ErrorKind::InvalidInput, "incident wave frequency differs from network frequency");
    return open_circuit_voltages(net.positions, net.element_exponent, wave);
}

} // namespace dbris
