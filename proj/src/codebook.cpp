// SPDX-License-Identifier: Apache-2.0
#include "dbris/codebook.hpp"

#include "dbris/error.hpp"
#include "dbris/phase_entropy.hpp"

#include <cmath>

namespace dbris
{

namespace
{

double wrapped_distance(double a, double b)
{
    const double d = wrap_degrees(a - b);
    return std::min(d, 360.0 - d);
}

std::size_t target_index(const PortNetwork& net, const Direction& d)
{
    const auto idx = net.grid().find(d);
    if (!idx)
        throw Error(ErrorKind::InvalidInput, "target direction is not on the pattern grid");
    return *idx;
}

Eigen::VectorXcd pattern_row(const PortNetwork& net, std::size_t g)
{
    Eigen::VectorXcd e(static_cast<Eigen::Index>(net.size()));
    for (std::size_t m = 0; m < net.size(); ++m)
        e(static_cast<Eigen::Index>(m)) = net.port_patterns[m].values()[g];
    return e;
}

} // namespace

StateAlphabet one_bit_alphabet()
{
    return {{0.0, 180.0}, {LoadModel::shifter(0), LoadModel::shifter(1)}};
}

StateAlphabet reflective_alphabet(const std::vector<double>& phases_deg, double magnitude, double z0)
{
    if (!(magnitude >= 0.0 && magnitude < 1.0))
        throw Error(ErrorKind::InvalidInput, "reflection magnitude must lie in [0, 1)");
    StateAlphabet a;
    for (double p : phases_deg)
    {
        a.phases_deg.push_back(wrap_degrees(p));
        a.loads.push_back(LoadModel::fixed(impedance_from_reflection(std::polar(magnitude, deg2rad(p)), z0)));
    }
    return a;
}

PortNetwork reflective_array_network(const ArraySpec& spec, const AngleGrid& grid, const IncidentWave& design,
                                     double z0)
{
    auto net = synthesize_network(spec, grid);
    const auto v = open_circuit_voltages(net, design);
    std::vector<cplx> oc(grid.size(), cplx(0.0));
    for (std::size_t m = 0; m < net.size(); ++m)
    {
        const cplx w = v(static_cast<Eigen::Index>(m)) / (2.0 * z0);
        const auto e = net.port_patterns[m].values();
        for (std::size_t g = 0; g < oc.size(); ++g)
            oc[g] += w * e[g];
    }
    net.oc_pattern = ComplexPattern(grid, std::move(oc));
    return net;
}

std::vector<double> ideal_phase_profile(const SteeringTarget& target, const std::vector<Position>& positions,
                                        double frequency_hz)
{
    const double k = wavenumber(frequency_hz);
    const auto ub = transverse(target.beam);
    const auto ui = transverse(target.incident.direction);
    std::vector<double> out;
    out.reserve(positions.size());
    for (const auto& r : positions)
        out.push_back(wrap_degrees(rad2deg(-k * (r.x * (ub.ux - ui.ux) + r.y * (ub.uy - ui.uy)))));
    return out;
}

std::vector<int> quantize_states(const std::vector<double>& profile, const std::vector<double>& phases_deg)
{
    if (phases_deg.empty())
        throw Error(ErrorKind::InvalidInput, "empty phase table");
    std::vector<int> out;
    out.reserve(profile.size());
    for (double ideal : profile)
    {
        int best = 0;
        double dbest = wrapped_distance(phases_deg[0], ideal);
        for (std::size_t s = 1; s < phases_deg.size(); ++s)
        {
            const double d = wrapped_distance(phases_deg[s], ideal);
            if (d < dbest)
            {
                dbest = d;
                best = static_cast<int>(s);
            }
        }
        out.push_back(best);
    }
    return out;
}

StateVector states_from_indices(const std::vector<int>& idx, const StateAlphabet& alphabet)
{
    StateVector out;
    out.reserve(idx.size());
    for (int s : idx)
    {
        if (s < 0 || static_cast<std::size_t>(s) >= alphabet.size())
            throw Error(ErrorKind::InvalidInput, "state index outside the alphabet");
        out.push_back(alphabet.loads[static_cast<std::size_t>(s)]);
    }
    return out;
}

double steering_objective(const PortNetwork& net, const StateAlphabet& alphabet, const std::vector<int>& states,
                          const SteeringTarget& target, const LoadConstants& k)
{
    const std::size_t g = target_index(net, target.beam);
    const auto i = port_currents(net.Z, load_matrix(states_from_indices(states, alphabet), k),
                                 open_circuit_voltages(net, target.incident));
    return std::norm(pattern_row(net, g).cwiseProduct(i).sum() + net.oc_pattern.values()[g]);
}

SteeringCodebook refine_codebook(const PortNetwork& net, const StateAlphabet& alphabet, const std::vector<int>& initial,
                                 const SteeringTarget& target, int budget, double cut_phi_deg, const LoadConstants& k)
{
    if (budget < 0)
        throw Error(ErrorKind::InvalidInput, "flip budget must be non-negative");
    if (initial.size() != net.size())
        throw Error(ErrorKind::InvalidInput, "codebook length differs from port count");

    const std::size_t g = target_index(net, target.beam);
    const Eigen::VectorXcd e = pattern_row(net, g);
    const cplx eoc = net.oc_pattern.values()[g];
    const Eigen::VectorXcd v = open_circuit_voltages(net, target.incident);
    Eigen::VectorXcd zalpha(static_cast<Eigen::Index>(alphabet.size()));
    for (std::size_t s = 0; s < alphabet.size(); ++s)
        zalpha(static_cast<Eigen::Index>(s)) = load_impedance(alphabet.loads[s], k);

    SteeringCodebook cb;
    cb.states = initial;
    cb.method = budget == 0 ? "quantized" : "quantized+greedy";
    cb.objective = steering_objective(net, alphabet, cb.states, target, k);

    // Up to 12 state bits the whole space within the flip budget is cheap to
    // enumerate, so small arrays get the true optimum rather than a local one.
    double space = 1.0;
    for (std::size_t n = 0; n < net.size(); ++n)
        space *= static_cast<double>(alphabet.size());
    if (budget > 0 && space <= kExhaustiveStates)
    {
        cb.method = "exhaustive";
        const auto total = static_cast<std::size_t>(space);
        std::vector<int> trial(net.size());
        for (std::size_t code = 0; code < total; ++code)
        {
            std::size_t rest = code;
            int changed = 0;
            for (std::size_t n = 0; n < net.size(); ++n)
            {
                trial[n] = static_cast<int>(rest % alphabet.size());
                rest /= alphabet.size();
                changed += trial[n] != initial[n] ? 1 : 0;
            }
            if (changed > budget)
                continue;
            const double obj = steering_objective(net, alphabet, trial, target, k);
            if (obj > cb.objective * (1.0 + 1e-12))
            {
                cb.states = trial;
                cb.objective = obj;
                cb.accepted_flips = changed;
            }
        }
        const auto r = scattered_pattern(net, states_from_indices(cb.states, alphabet), target.incident, k);
        cb.metrics = pattern_metrics(r.pattern, cut_phi_deg);
        return cb;
    }

    const auto m = static_cast<Eigen::Index>(net.size());
    while (cb.accepted_flips < budget)
    {
        // Rank-one screening: changing load n by d moves e.i by
        // -w_n d i_n / (1 + d Ainv_nn) with w = A^-T e.
        Eigen::MatrixXcd A = net.Z;
        A.diagonal() += load_matrix(states_from_indices(cb.states, alphabet), k);
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
        const Eigen::VectorXcd i = lu.solve(-v);
        const Eigen::VectorXcd w = lu.transpose().solve(e);
        const Eigen::VectorXcd dinv = lu.inverse().diagonal();
        const cplx base = e.cwiseProduct(i).sum() + eoc;

        double best = std::norm(base);
        Eigen::Index best_n = -1;
        int best_s = 0;
        for (Eigen::Index n = 0; n < m; ++n)
        {
            const int cur = cb.states[static_cast<std::size_t>(n)];
            for (Eigen::Index s = 0; s < zalpha.size(); ++s)
            {
                if (s == cur)
                    continue;
                const cplx d = zalpha(s) - zalpha(cur);
                const double obj = std::norm(base - w(n) * d * i(n) / (1.0 + d * dinv(n)));
                if (obj > best * (1.0 + 1e-12))
                {
                    best = obj;
                    best_n = n;
                    best_s = static_cast<int>(s);
                }
            }
        }
        if (best_n < 0)
            break;
        auto trial = cb.states;
        trial[static_cast<std::size_t>(best_n)] = best_s;
        const double obj = steering_objective(net, alphabet, trial, target, k);
        if (!(obj > cb.objective))
            break;
        cb.states = std::move(trial);
        cb.objective = obj;
        ++cb.accepted_flips;
    }

    const auto r = scattered_pattern(net, states_from_indices(cb.states, alphabet), target.incident, k);
    cb.metrics = pattern_metrics(r.pattern, cut_phi_deg);
    return cb;
}

std::vector<SteeringRow> steering_report(const PortNetwork& net, const StateAlphabet& alphabet,
                                         const std::vector<Direction>& targets, const IncidentWave& wave,
                                         double cut_phi_deg, int budget, const LoadConstants& k)
{
    std::vector<SteeringRow> rows;
    for (const auto& t : targets)
    {
        SteeringRow row;
        row.target = t;
        if (!net.grid().find(t))
        {
            row.error = "target outside grid";
            rows.push_back(std::move(row));
            continue;
        }
        const SteeringTarget st{t, wave};
        const auto init = quantize_states(ideal_phase_profile(st, net.positions, net.frequency_hz), alphabet.phases_deg);
        row.codebook = refine_codebook(net, alphabet, init, st, budget, cut_phi_deg, k);
        row.ok = true;
        row.achieved_theta = row.codebook.metrics.peak_direction.theta_deg;
        row.pointing_error = std::abs(row.achieved_theta - t.theta_deg);
        row.sll_db = row.codebook.metrics.sidelobe_level_db;
        row.peak_rel_db = row.codebook.metrics.peak_level_db;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace dbris
