// SPDX-License-Identifier: Apache-2.0
#include "dbris/topology.hpp"

#include "dbris/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

namespace dbris
{

namespace
{

constexpr double kNullField = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class DisjointSets
{
public:
    explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) { std::iota(parent_.begin(), parent_.end(), 0); }

    int find(int a)
    {
        while (parent_[static_cast<std::size_t>(a)] != a)
        {
            auto& p = parent_[static_cast<std::size_t>(a)];
            p = parent_[static_cast<std::size_t>(p)];
            a = p;
        }
        return a;
    }

    void unite(int a, int b) { parent_[static_cast<std::size_t>(find(a))] = find(b); }

private:
    std::vector<int> parent_;
};

DisjointSets dc_nets(const PortIncidenceMatrix& y, const std::vector<std::uint8_t>& x0)
{
    DisjointSets ds(y.elements());
    for (int m = 0; m < y.ports(); ++m)
    {
        if (x0[static_cast<std::size_t>(m)])
        {
            const auto [a, b] = y.endpoints(m);
            ds.unite(a, b);
        }
    }
    return ds;
}

// Cathode and anode element of a switch.
std::pair<int, int> terminals(const PortIncidenceMatrix& y, const SwitchPlacement& s)
{
    const auto [n1, n2] = y.endpoints(s.port);
    return s.anode_side == 0 ? std::pair{n2, n1} : std::pair{n1, n2};
}

void check_rcond(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu)
{
    const double rc = lu.rcond();
    if (!(rc * 1e12 > 1.0))
        throw Error(ErrorKind::SingularNetwork, "singular network: condition estimate " + std::to_string(1.0 / rc));
}

} // namespace

PortIncidenceMatrix::PortIncidenceMatrix(int elements, std::vector<int> y) : n_(elements), y_(std::move(y))
{
    if (n_ < 1 || y_.size() != static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_))
        throw Error(ErrorKind::IncidenceInvalid, "incidence matrix invalid: expected an N x N matrix");
    std::vector<std::pair<int, int>> ends;
    std::vector<int> seen;
    for (int a = 0; a < n_; ++a)
    {
        if (at(a, a) != 0)
            throw Error(ErrorKind::IncidenceInvalid, "incidence matrix invalid: non-zero diagonal");
        for (int b = a + 1; b < n_; ++b)
        {
            const int id = at(a, b);
            if (id != at(b, a))
                throw Error(ErrorKind::IncidenceInvalid, "incidence matrix invalid: not symmetric");
            if (id < 0)
                throw Error(ErrorKind::IncidenceInvalid, "incidence matrix invalid: negative port id");
            if (id == 0)
                continue;
            if (static_cast<std::size_t>(id) > seen.size())
            {
                seen.resize(static_cast<std::size_t>(id), 0);
                ends.resize(static_cast<std::size_t>(id));
            }
            if (seen[static_cast<std::size_t>(id - 1)]++)
                throw Error(ErrorKind::IncidenceInvalid, "incidence matrix invalid: port id used twice");
            ends[static_cast<std::size_t>(id - 1)] = {a, b};
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
        throw Error(ErrorKind::IncidenceInvalid, "incidence matrix invalid: port ids are not contiguous");
    ends_ = std::move(ends);
}

PortIncidenceMatrix PortIncidenceMatrix::grid(int rows, int cols)
{
    if (rows < 1 || cols < 1)
        throw Error(ErrorKind::InvalidInput, "grid element needs at least one patch");
    const int n = rows * cols;
    std::vector<int> y(static_cast<std::size_t>(n * n), 0);
    int id = 0;
    auto link = [&](int a, int b) {
        ++id;
        y[static_cast<std::size_t>(a * n + b)] = id;
        y[static_cast<std::size_t>(b * n + a)] = id;
    };
    for (int r = 0; r < rows; ++r)
    {
        for (int c = 0; c < cols; ++c)
        {
            const int e = r * cols + c;
            if (c + 1 < cols)
                link(e, e + 1);
            if (r + 1 < rows)
                link(e, e + cols);
        }
    }
    return PortIncidenceMatrix(n, std::move(y));
}

std::vector<Position> port_midpoints(const PortIncidenceMatrix& y, const std::vector<Position>& centres)
{
    if (centres.size() != static_cast<std::size_t>(y.elements()))
        throw Error(ErrorKind::InvalidInput, "element centre count differs from incidence matrix size");
    std::vector<Position> out;
    out.reserve(static_cast<std::size_t>(y.ports()));
    for (int m = 0; m < y.ports(); ++m)
    {
        const auto [a, b] = y.endpoints(m);
        const auto& pa = centres[static_cast<std::size_t>(a)];
        const auto& pb = centres[static_cast<std::size_t>(b)];
        out.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
    }
    return out;
}

bool geometry_valid(const GeometryVector& x, int ports)
{
    if (x.x0.size() != static_cast<std::size_t>(ports))
        return false;
    for (std::size_t j = 0; j < x.switches.size(); ++j)
    {
        const auto& s = x.switches[j];
        if (s.port < 0 || s.port >= ports || (s.anode_side != 0 && s.anode_side != 1))
            return false;
        if (x.x0[static_cast<std::size_t>(s.port)])
            return false;
        for (std::size_t i = 0; i < j; ++i)
        {
            if (x.switches[i].port == s.port)
                return false;
        }
    }
    return true;
}

void FeedingSpec::validate(int elements) const
{
    for (std::size_t i = 0; i < dc_points.size(); ++i)
    {
        if (dc_points[i] < 0 || dc_points[i] >= elements)
            throw Error(ErrorKind::InvalidInput, "DC point outside the element range");
        for (std::size_t j = 0; j < i; ++j)
        {
            if (dc_points[i] == dc_points[j])
                throw Error(ErrorKind::InvalidInput, "DC points must be distinct");
        }
    }
}

bool feeding_constraint(const PortIncidenceMatrix& y, const GeometryVector& x, const FeedingSpec& spec)
{
    spec.validate(y.elements());
    if (!geometry_valid(x, y.ports()))
        return false;

    auto ds = dc_nets(y, x.x0);
    std::array<int, 4> net{};
    for (std::size_t i = 0; i < 4; ++i)
        net[i] = ds.find(spec.dc_points[i]);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (net[i] == net[j])
                return false;

    std::array<bool, 3> used{};
    for (const auto& s : x.switches)
    {
        const auto [cathode, anode] = terminals(y, s);
        if (ds.find(cathode) != net[0])
            return false;
        const int a = ds.find(anode);
        bool matched = false;
        for (std::size_t c = 0; c < 3; ++c)
        {
            if (a == net[c + 1] && !used[c])
            {
                used[c] = true;
                matched = true;
            }
        }
        if (!matched)
            return false;
    }
    return true;
}

std::vector<StateVector> element_states(const GeometryVector& x)
{
    StateVector base(x.x0.size());
    for (std::size_t m = 0; m < x.x0.size(); ++m)
        base[m] = x.x0[m] ? LoadModel::shorted() : LoadModel::open();
    const std::size_t count = std::size_t{1} << x.switches.size();
    std::vector<StateVector> out(count, base);
    for (std::size_t s = 0; s < count; ++s)
        for (std::size_t j = 0; j < x.switches.size(); ++j)
            out[s][static_cast<std::size_t>(x.switches[j].port)] = LoadModel::diode(((s >> j) & 1U) != 0);
    return out;
}

PhaseSet reflection_phases(const PortNetwork& net, const GeometryVector& x, const IncidentWave& wave,
                           const Direction& observation, const LoadConstants& k)
{
    if (!geometry_valid(x, static_cast<int>(net.size())))
        throw Error(ErrorKind::InvalidInput, "geometry vector does not fit the network");
    const auto idx = net.grid().find(observation);
    if (!idx)
        throw Error(ErrorKind::InvalidInput, "observation direction is not on the network grid");
    std::vector<double> phases;
    for (const auto& states : element_states(x))
    {
        const auto r = scattered_pattern(net, states, wave, k);
        const cplx e = r.pattern.values()[*idx];
        if (std::abs(e) < kNullField)
            throw Error(ErrorKind::NullField, "null field, phase undefined");
        phases.push_back(rad2deg(std::arg(e)));
    }
    return PhaseSet::wrapped(phases);
}

SubElement grid_element(int rows, int cols, double pitch_m, const CouplingModel& coupling)
{
    auto y = PortIncidenceMatrix::grid(rows, cols);
    auto pos = port_midpoints(y, lattice_positions(rows, cols, pitch_m));
    return SubElement{std::move(y), std::move(pos), coupling};
}

void EntropyObjectiveSpec::validate() const
{
    if (angles.empty() || frequencies_hz.empty())
        throw Error(ErrorKind::InvalidInput, "objective needs at least one angle and one frequency");
    for (double f : frequencies_hz)
    {
        if (!(f > 0.0))
            throw Error(ErrorKind::InvalidInput, "objective frequencies must be positive");
    }
    if (!weights.empty())
    {
        if (weights.size() != samples())
            throw Error(ErrorKind::InvalidInput, "objective weights must have K*L entries");
        double sum = 0.0;
        for (double w : weights)
        {
            if (!(w >= 0.0))
                throw Error(ErrorKind::InvalidInput, "objective weights must be non-negative");
            sum += w;
        }
        if (!(sum > 0.0))
            throw Error(ErrorKind::InvalidInput, "objective weights sum to zero");
    }
}

EntropyObjective::EntropyObjective(SubElement element, FeedingSpec feeding, EntropyObjectiveSpec spec, LoadConstants k)
    : element_(std::move(element)), feeding_(feeding), spec_(std::move(spec)), k_(k)
{
    spec_.validate();
    feeding_.validate(element_.y.elements());
    element_.coupling.validate();
    if (element_.port_positions.size() != static_cast<std::size_t>(element_.y.ports()))
        throw Error(ErrorKind::InvalidInput, "port position count differs from incidence matrix");

    const auto kk = static_cast<Eigen::Index>(spec_.angles.size());
    const auto m = static_cast<Eigen::Index>(element_.port_positions.size());
    const double q = element_.coupling.element_exponent;
    for (double f : spec_.frequencies_hz)
    {
        Band b;
        b.Z = coupling_matrix(element_.port_positions, f, element_.coupling);
        check_passive(b.Z);
        b.v = open_circuit_voltages(element_.port_positions, q, IncidentWave{spec_.incidence, spec_.amplitude, f});
        b.E.resize(kk, m);
        b.eoc.resize(kk);
        for (Eigen::Index a = 0; a < kk; ++a)
        {
            const auto& d = spec_.angles[static_cast<std::size_t>(a)];
            b.E.row(a) = port_pattern_values(element_.port_positions, f, q, d).transpose();
            b.eoc(a) = element_.coupling.open_circuit_amplitude * element_factor(q, d.theta_deg);
        }
        bands_.push_back(std::move(b));
    }
}

std::vector<std::vector<cplx>> EntropyObjective::sample_fields(const GeometryVector& x) const
{
    const int ports = element_.y.ports();
    if (!geometry_valid(x, ports))
        throw Error(ErrorKind::InvalidInput, "geometry vector does not fit the element");

    const auto m = static_cast<Eigen::Index>(ports);
    const auto q = static_cast<Eigen::Index>(x.switches.size());
    const std::size_t nstates = std::size_t{1} << x.switches.size();
    const std::size_t kk = spec_.angles.size();
    const cplx delta = k_.open_ohm - k_.diode_on_ohm;

    Eigen::VectorXcd zl(m);
    for (Eigen::Index p = 0; p < m; ++p)
        zl(p) = x.x0[static_cast<std::size_t>(p)] ? cplx(0.0) : cplx(k_.open_ohm);
    for (const auto& s : x.switches)
        zl(s.port) = k_.diode_on_ohm;

    std::vector<std::vector<cplx>> out(spec_.samples(), std::vector<cplx>(nstates));
    for (std::size_t l = 0; l < bands_.size(); ++l)
    {
        const auto& b = bands_[l];
        Eigen::MatrixXcd A = b.Z;
        A.diagonal() += zl;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
        check_rcond(lu);

        Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(m, q + 1);
        rhs.col(0) = -b.v;
        for (Eigen::Index j = 0; j < q; ++j)
            rhs(x.switches[static_cast<std::size_t>(j)].port, j + 1) = 1.0;
        const Eigen::MatrixXcd sol = lu.solve(rhs);
        const Eigen::VectorXcd i0 = sol.col(0);
        const Eigen::MatrixXcd fields = b.E * sol; // K x (Q+1)

        Eigen::MatrixXcd C(q, q);
        Eigen::VectorXcd i0s(q);
        for (Eigen::Index a = 0; a < q; ++a)
        {
            const auto pa = x.switches[static_cast<std::size_t>(a)].port;
            i0s(a) = i0(pa);
            for (Eigen::Index c = 0; c < q; ++c)
                C(a, c) = sol(pa, c + 1);
        }

        for (std::size_t s = 0; s < nstates; ++s)
        {
            std::vector<Eigen::Index> off;
            for (Eigen::Index j = 0; j < q; ++j)
                if (((s >> j) & 1U) == 0)
                    off.push_back(j);
            const auto r = static_cast<Eigen::Index>(off.size());
            Eigen::VectorXcd corr;
            if (r > 0)
            {
                Eigen::MatrixXcd G(r, r);
                Eigen::VectorXcd g(r);
                for (Eigen::Index a = 0; a < r; ++a)
                {
                    g(a) = i0s(off[a]);
                    for (Eigen::Index c = 0; c < r; ++c)
                        G(a, c) = C(off[a], off[c]);
                    G(a, a) += 1.0 / delta;
                }
                corr = G.partialPivLu().solve(g);
            }
            for (std::size_t a = 0; a < kk; ++a)
            {
                const auto ai = static_cast<Eigen::Index>(a);
                cplx e = fields(ai, 0) + b.eoc(ai);
                for (Eigen::Index c = 0; c < r; ++c)
                    e -= fields(ai, off[c] + 1) * corr(c);
                out[l * kk + a][s] = e;
            }
        }
    }
    return out;
}

std::vector<double> EntropyObjective::sample_entropies(const GeometryVector& x, ObjectiveStats* stats) const
{
    const auto fields = sample_fields(x);
    std::vector<double> h(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i)
    {
        std::vector<double> phases;
        bool null = false;
        for (const cplx& e : fields[i])
        {
            if (std::abs(e) < kNullField)
                null = true;
            phases.push_back(rad2deg(std::arg(e)));
        }
        if (null)
        {
            if (stats)
                ++stats->null_samples;
            h[i] = 0.0;
            continue;
        }
        h[i] = entropy(PhaseSet::wrapped(phases));
    }
    return h;
}

namespace
{

double weighted_mean(const std::vector<double>& h, const std::vector<double>& w)
{
    if (w.empty())
        return std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(h.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
    {
        num += w[i] * h[i];
        den += w[i];
    }
    return num / den;
}

} // namespace

double EntropyObjective::operator()(const GeometryVector& x, ObjectiveStats* stats) const
{
    if (!feeding_constraint(element_.y, x, feeding_))
        return kNegInf;
    return weighted_mean(sample_entropies(x, stats), spec_.weights);
}

double objective_direct(const SubElement& element, const FeedingSpec& feeding, const EntropyObjectiveSpec& spec,
                        const GeometryVector& x, const LoadConstants& k)
{
    spec.validate();
    if (!feeding_constraint(element.y, x, feeding))
        return kNegInf;
    const double q = element.coupling.element_exponent;
    const auto states = element_states(x);
    std::vector<double> h;
    for (double f : spec.frequencies_hz)
    {
        const auto Z = coupling_matrix(element.port_positions, f, element.coupling);
        const auto v = open_circuit_voltages(element.port_positions, q, IncidentWave{spec.incidence, spec.amplitude, f});
        std::vector<Eigen::VectorXcd> currents;
        for (const auto& st : states)
            currents.push_back(port_currents(Z, load_matrix(st, k), v));
        for (const auto& d : spec.angles)
        {
            const auto e = port_pattern_values(element.port_positions, f, q, d);
            const cplx eoc = element.coupling.open_circuit_amplitude * element_factor(q, d.theta_deg);
            std::vector<double> phases;
            bool null = false;
            for (const auto& i : currents)
            {
                const cplx es = e.cwiseProduct(i).sum() + eoc;
                null = null || std::abs(es) < kNullField;
                phases.push_back(rad2deg(std::arg(es)));
            }
            h.push_back(null ? 0.0 : entropy(PhaseSet::wrapped(phases)));
        }
    }
    return weighted_mean(h, spec.weights);
}

int GenomeLayout::position_bits() const
{
    return ports <= 1 ? 0 : static_cast<int>(std::bit_width(static_cast<unsigned>(ports - 1)));
}

std::optional<GeometryVector> decode(const Genome& g, const GenomeLayout& layout)
{
    if (g.size() != static_cast<std::size_t>(layout.size()))
        throw Error(ErrorKind::InvalidInput, "genome length differs from layout");
    GeometryVector x;
    x.x0.assign(g.begin(), g.begin() + layout.ports);
    std::size_t at = static_cast<std::size_t>(layout.ports);
    for (int j = 0; j < layout.switches; ++j)
    {
        int pos = 0;
        for (int b = 0; b < layout.position_bits(); ++b)
            pos = (pos << 1) | (g[at++] ? 1 : 0);
        const int side = g[at++] ? 1 : 0;
        x.switches.push_back({pos, side});
    }
    if (!geometry_valid(x, layout.ports))
        return std::nullopt;
    return x;
}

Genome encode(const GeometryVector& x, const GenomeLayout& layout)
{
    if (x.x0.size() != static_cast<std::size_t>(layout.ports) ||
        x.switches.size() != static_cast<std::size_t>(layout.switches))
        throw Error(ErrorKind::InvalidInput, "geometry vector does not match genome layout");
    Genome g(x.x0.begin(), x.x0.end());
    const int bits = layout.position_bits();
    for (const auto& s : x.switches)
    {
        for (int b = bits - 1; b >= 0; --b)
            g.push_back(static_cast<std::uint8_t>((s.port >> b) & 1));
        g.push_back(static_cast<std::uint8_t>(s.anode_side ? 1 : 0));
    }
    return g;
}

std::optional<GeometryVector> sample_feasible(const PortIncidenceMatrix& y, const FeedingSpec& spec, int switches,
                                              std::mt19937_64& rng, int attempts)
{
    spec.validate(y.elements());
    if (switches < 0 || switches > 3)
        return std::nullopt;
    const auto m = static_cast<std::size_t>(y.ports());
    std::bernoulli_distribution coin(0.5);

    // Every injective map from switches to the three control points.
    std::vector<std::vector<int>> maps;
    std::vector<int> perm{0, 1, 2};
    do
    {
        std::vector<int> head(perm.begin(), perm.begin() + switches);
        if (std::find(maps.begin(), maps.end(), head) == maps.end())
            maps.push_back(head);
    } while (std::next_permutation(perm.begin(), perm.end()));

    for (int t = 0; t < attempts; ++t)
    {
        GeometryVector x;
        x.x0.resize(m);
        for (auto& b : x.x0)
            b = coin(rng) ? 1 : 0;
        auto ds = dc_nets(y, x.x0);
        std::array<int, 4> net{};
        bool distinct = true;
        for (std::size_t i = 0; i < 4; ++i)
        {
            net[i] = ds.find(spec.dc_points[i]);
            for (std::size_t j = 0; j < i; ++j)
                distinct = distinct && net[i] != net[j];
        }
        if (!distinct)
            continue;

        std::array<std::vector<SwitchPlacement>, 3> cand;
        for (int p = 0; p < y.ports(); ++p)
        {
            if (x.x0[static_cast<std::size_t>(p)])
                continue;
            const auto [n1, n2] = y.endpoints(p);
            const int r1 = ds.find(n1);
            const int r2 = ds.find(n2);
            for (std::size_t c = 0; c < 3; ++c)
            {
                if (r1 == net[0] && r2 == net[c + 1])
                    cand[c].push_back({p, 1});
                if (r2 == net[0] && r1 == net[c + 1])
                    cand[c].push_back({p, 0});
            }
        }

        std::vector<std::uint64_t> weight;
        std::uint64_t total = 0;
        for (const auto& mp : maps)
        {
            std::uint64_t w = 1;
            for (int c : mp)
                w *= cand[static_cast<std::size_t>(c)].size();
            weight.push_back(w);
            total += w;
        }
        if (total == 0)
            continue;
        std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
        std::uint64_t r = pick(rng);
        std::size_t chosen = 0;
        while (r >= weight[chosen])
            r -= weight[chosen++];
        for (int c : maps[chosen])
        {
            const auto& list = cand[static_cast<std::size_t>(c)];
            std::uniform_int_distribution<std::size_t> which(0, list.size() - 1);
            x.switches.push_back(list[which(rng)]);
        }
        return x;
    }
    return std::nullopt;
}

void GaParams::validate() const
{
    if (population < 2)
        throw Error(ErrorKind::InvalidInput, "GA population must be at least 2");
    if (generations < 1)
        throw Error(ErrorKind::InvalidInput, "GA needs at least one generation");
    if (!(crossover >= 0.0 && crossover <= 1.0) || mutation > 1.0)
        throw Error(ErrorKind::InvalidInput, "GA rates must lie in [0, 1]");
    if (tournament < 1 || elitism < 0 || elitism >= population)
        throw Error(ErrorKind::InvalidInput, "invalid GA tournament or elitism");
    if (max_evaluations < 0 || init_attempts < 1)
        throw Error(ErrorKind::InvalidInput, "invalid GA budget");
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
    // splitmix64 finaliser over the combined words
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

GaResult optimize(const PortIncidenceMatrix& y, const FeedingSpec& feeding, int switches, const FitnessFn& fitness,
                  const GaParams& params, const std::vector<Genome>* initial)
{
    params.validate();
    feeding.validate(y.elements());
    const GenomeLayout layout{y.ports(), switches};
    const auto len = static_cast<std::size_t>(layout.size());
    const double pm = params.mutation < 0.0 ? 1.0 / static_cast<double>(len) : params.mutation;
    const auto pop = static_cast<std::size_t>(params.population);

    std::map<Genome, double> cache;
    GaResult res;
    bool exhausted = false;

    auto evaluate = [&](const Genome& g) {
        if (auto it = cache.find(g); it != cache.end())
            return it->second;
        if (params.max_evaluations > 0 && res.evaluations >= params.max_evaluations)
        {
            exhausted = true;
            return kNegInf;
        }
        ++res.evaluations;
        double f = kNegInf;
        if (auto x = decode(g, layout); x && feeding_constraint(y, *x, feeding))
            f = fitness(*x);
        cache.emplace(g, f);
        return f;
    };

    std::vector<Genome> cur;
    if (initial)
    {
        for (const auto& g : *initial)
        {
            if (g.size() != len)
                throw Error(ErrorKind::InvalidInput, "initial genome length differs from layout");
        }
        for (std::size_t i = 0; i < pop; ++i)
            cur.push_back((*initial)[i % initial->size()]);
    }
    else
    {
        for (std::size_t i = 0; i < pop; ++i)
        {
            std::mt19937_64 rng(mix_seed(params.seed, i));
            auto x = sample_feasible(y, feeding, switches, rng, params.init_attempts);
            if (!x)
                throw Error(ErrorKind::InfeasiblePopulation, "infeasible population: sampler budget exhausted");
            cur.push_back(encode(*x, layout));
        }
    }

    std::vector<double> fit(pop);
    Genome best_genome;
    double best = kNegInf;
    auto record = [&](int gen) {
        GaGeneration h{gen, kNegInf, 0.0, 0.0};
        int feasible = 0;
        for (std::size_t i = 0; i < pop; ++i)
        {
            if (fit[i] == kNegInf)
                continue;
            ++feasible;
            h.mean += fit[i];
            if (fit[i] > h.best)
                h.best = fit[i];
            if (fit[i] > best)
            {
                best = fit[i];
                best_genome = cur[i];
            }
        }
        h.mean = feasible ? h.mean / feasible : kNegInf;
        h.feasible_fraction = static_cast<double>(feasible) / static_cast<double>(pop);
        res.history.push_back(h);
    };

    for (std::size_t i = 0; i < pop; ++i)
        fit[i] = evaluate(cur[i]);
    record(0);
    if (best == kNegInf)
        throw Error(ErrorKind::InfeasiblePopulation, "infeasible population: no feasible individual");

    for (int gen = 1; gen <= params.generations && !exhausted; ++gen)
    {
        std::vector<std::size_t> order(pop);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });

        std::vector<Genome> next;
        std::vector<double> next_fit;
        for (int e = 0; e < params.elitism; ++e)
        {
            next.push_back(cur[order[static_cast<std::size_t>(e)]]);
            next_fit.push_back(fit[order[static_cast<std::size_t>(e)]]);
        }

        for (std::size_t i = next.size(); i < pop; ++i)
        {
            std::mt19937_64 rng(mix_seed(mix_seed(params.seed, static_cast<std::uint64_t>(gen)), i));
            std::uniform_int_distribution<std::size_t> any(0, pop - 1);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            auto tournament = [&] {
                std::size_t w = any(rng);
                for (int t = 1; t < params.tournament; ++t)
                {
                    const std::size_t c = any(rng);
                    if (fit[c] > fit[w] || (fit[c] == fit[w] && c < w))
                        w = c;
                }
                return w;
            };
            const auto& a = cur[tournament()];
            const auto& b = cur[tournament()];
            Genome child = a;
            if (u(rng) < params.crossover)
            {
                for (std::size_t k = 0; k < len; ++k)
                    if (u(rng) < 0.5)
                        child[k] = b[k];
            }
            for (auto& bit : child)
                if (u(rng) < pm)
                    bit ^= 1;
            next.push_back(std::move(child));
            next_fit.push_back(0.0);
        }
        for (std::size_t i = static_cast<std::size_t>(params.elitism); i < pop; ++i)
            next_fit[i] = evaluate(next[i]);
        cur = std::move(next);
        fit = std::move(next_fit);
        record(gen);
    }

    res.best = *decode(best_genome, layout);
    res.fitness = best;
    return res;
}

} // namespace dbris
