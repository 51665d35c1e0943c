// SPDX-License-Identifier: Apache-2.0
#include "dbris/experiments.hpp"

#include "dbris/measurement.hpp"
#include "dbris/psi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace dbris
{

namespace fs = std::filesystem;

namespace
{

[[noreturn]] void missing(const char* key)
{
    throw Error(ErrorKind::InvalidInput, std::string("config: missing '") + key + "'");
}

template <class T>
T req(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        missing(key);
    try
    {
        return j.at(key).get<T>();
    }
    catch (const json::exception& e)
    {
        throw Error(ErrorKind::Parse, std::string("config: '") + key + "': " + e.what());
    }
}

template <class T>
T opt(const json& j, const char* key, T def)
{
    if (!j.is_object() || !j.contains(key))
        return def;
    return req<T>(j, key);
}

const json& section(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        missing(key);
    return j.at(key);
}

cplx complex_value(const json& j, const char* key, cplx def)
{
    if (!j.is_object() || !j.contains(key))
        return def;
    const auto& v = j.at(key);
    if (v.is_number())
        return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw Error(ErrorKind::Parse, std::string("config: '") + key + "' must be a number or [re, im]");
}

std::vector<double> frequency_list(const json& j)
{
    if (j.is_array())
        return j.get<std::vector<double>>();
    const double start = req<double>(j, "start_hz");
    const double stop = req<double>(j, "stop_hz");
    const int points = req<int>(j, "points");
    return FrequencySweep{start, stop, points}.frequencies();
}

std::vector<double> theta_range(const json& j)
{
    const double start = req<double>(j, "start");
    const double stop = req<double>(j, "stop");
    const double step = req<double>(j, "step");
    if (!(step > 0.0) || stop < start)
        throw Error(ErrorKind::InvalidInput, "config: invalid angle range");
    std::vector<double> out;
    const auto n = static_cast<int>(std::llround((stop - start) / step));
    for (int i = 0; i <= n; ++i)
        out.push_back(start + i * step);
    return out;
}

std::string resolve(const std::string& dir, const std::string& path)
{
    const fs::path p(path);
    if (p.is_absolute() || dir.empty())
        return p.string();
    return (fs::path(dir) / p).string();
}

std::uint64_t config_seed(const json& cfg, std::optional<std::uint64_t> override_seed)
{
    if (override_seed)
        return *override_seed;
    if (!cfg.contains("seed"))
        throw Error(ErrorKind::InvalidInput, "config: missing 'seed' (or pass --seed)");
    return req<std::uint64_t>(cfg, "seed");
}

std::string indexed(const char* prefix, std::size_t i, const char* suffix)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%02zu%s", prefix, i, suffix);
    return buf;
}

std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

} // namespace

int exit_code(ErrorKind kind)
{
    switch (kind)
    {
    case ErrorKind::InfeasiblePopulation:
        return 3;
    case ErrorKind::SingularNetwork:
    case ErrorKind::NullField:
        return 4;
    default:
        return 2;
    }
}

CouplingModel coupling_from_json(const json& j)
{
    CouplingModel m;
    m.element_exponent = opt<double>(j, "element_exponent", 0.0);
    m.self_impedance = complex_value(j, "self_impedance", {50.0, 0.0});
    m.coupling_strength = opt<double>(j, "coupling_strength", 0.1);
    m.coupling_decay = opt<double>(j, "coupling_decay", 0.0);
    m.open_circuit_amplitude = complex_value(j, "open_circuit_amplitude", {0.0, 0.0});
    m.validate();
    return m;
}

ArraySpec array_from_json(const json& j)
{
    ArraySpec s;
    s.rows = req<int>(j, "rows");
    s.cols = req<int>(j, "cols");
    s.frequency_hz = req<double>(j, "frequency_hz");
    if (j.contains("spacing_wavelengths"))
        s.spacing_m = req<double>(j, "spacing_wavelengths") * kSpeedOfLight / s.frequency_hz;
    else
        s.spacing_m = req<double>(j, "spacing_m");
    s.coupling = coupling_from_json(j);
    s.validate();
    return s;
}

AngleGrid grid_from_json(const json& j)
{
    return AngleGrid::uniform(opt<double>(j, "theta_start", -90.0), opt<double>(j, "theta_stop", 90.0),
                              opt<double>(j, "theta_step", 1.0), opt<std::vector<double>>(j, "phi", {0.0}),
                              opt<double>(j, "phi_step", 90.0));
}

IncidentWave incidence_from_json(const json& j, double frequency_hz)
{
    return IncidentWave{{opt<double>(j, "theta", 0.0), opt<double>(j, "phi", 0.0)},
                        complex_value(j, "amplitude", {1.0, 0.0}),
                        frequency_hz};
}

SubElement element_from_json(const json& j)
{
    const int rows = req<int>(j, "rows");
    const int cols = req<int>(j, "cols");
    double pitch = 0.0;
    if (j.contains("pitch_wavelengths"))
        pitch = req<double>(j, "pitch_wavelengths") * kSpeedOfLight / req<double>(j, "pitch_reference_hz");
    else
        pitch = req<double>(j, "pitch_m");
    if (!(pitch > 0.0))
        throw Error(ErrorKind::InvalidInput, "config: element pitch must be positive");
    const auto coupling = coupling_from_json(j);
    if (!j.contains("Y"))
        return grid_element(rows, cols, pitch, coupling);

    std::vector<int> y;
    try
    {
        for (const auto& row : j.at("Y"))
            for (const auto& v : row)
                y.push_back(v.get<int>());
    }
    catch (const json::exception& e)
    {
        throw Error(ErrorKind::Parse, std::string("config: 'Y': ") + e.what());
    }
    PortIncidenceMatrix inc(rows * cols, std::move(y));
    auto pos = port_midpoints(inc, lattice_positions(rows, cols, pitch));
    return SubElement{std::move(inc), std::move(pos), coupling};
}

FeedingSpec feeding_from_json(const json& j)
{
    const auto v = req<std::vector<int>>(j, "dc_points");
    if (v.size() != 4)
        throw Error(ErrorKind::InvalidInput, "config: 'dc_points' needs four element indices");
    FeedingSpec f;
    std::copy(v.begin(), v.end(), f.dc_points.begin());
    return f;
}

EntropyObjectiveSpec objective_from_json(const json& j, const Direction& incidence)
{
    EntropyObjectiveSpec s;
    const auto& a = section(j, "angles");
    const double phi = opt<double>(a, "phi", 0.0);
    for (double t : theta_range(a))
        s.angles.push_back({t, phi});
    s.frequencies_hz = frequency_list(section(j, "frequencies_hz"));
    s.weights = opt<std::vector<double>>(j, "weights", {});
    s.incidence = incidence;
    s.validate();
    return s;
}

GaParams ga_from_json(const json& j, std::uint64_t seed)
{
    GaParams p;
    p.population = opt<int>(j, "population", p.population);
    p.generations = opt<int>(j, "generations", p.generations);
    p.crossover = opt<double>(j, "crossover", p.crossover);
    p.mutation = opt<double>(j, "mutation", p.mutation);
    p.tournament = opt<int>(j, "tournament", p.tournament);
    p.elitism = opt<int>(j, "elitism", p.elitism);
    p.max_evaluations = opt<int>(j, "max_evaluations", p.max_evaluations);
    p.init_attempts = opt<int>(j, "init_attempts", p.init_attempts);
    p.seed = seed;
    p.validate();
    return p;
}

std::vector<Direction> targets_from_json(const json& j)
{
    std::vector<Direction> out;
    if (j.is_array())
    {
        for (const auto& t : j)
            out.push_back({req<double>(t, "theta"), opt<double>(t, "phi", 0.0)});
        return out;
    }
    const double phi = opt<double>(j, "phi", 0.0);
    for (double t : theta_range(j))
        out.push_back({t, phi});
    return out;
}

TopologyRun run_topology(const json& cfg, std::uint64_t seed)
{
    const auto element = element_from_json(section(cfg, "element"));
    const auto feeding = feeding_from_json(section(cfg, "feeding"));
    feeding.validate(element.y.elements());
    const int switches = opt<int>(cfg, "switches", 3);
    if (switches < 0 || switches > 16)
        throw Error(ErrorKind::InvalidInput, "config: 'switches' out of range");
    const auto inc = incidence_from_json(cfg.value("incidence", json::object()), 1.0);
    const auto spec = objective_from_json(section(cfg, "objective"), inc.direction);
    const EntropyObjectiveSpec base = [&] {
        auto s = spec;
        s.amplitude = inc.amplitude;
        return s;
    }();
    const auto ga = ga_from_json(cfg.value("ga", json::object()), seed);

    EntropyObjective objective(element, feeding, base);
    TopologyRun run;
    run.ga = optimize(element.y, feeding, switches, [&](const GeometryVector& x) { return objective(x); }, ga);

    const auto& rep = cfg.value("report", json::object());
    EntropyObjectiveSpec rs = base;
    rs.angles.clear();
    rs.weights.clear();
    const double phi = opt<double>(rep, "phi", 0.0);
    run.report_theta = theta_range(json{{"start", opt<double>(rep, "theta_start", -40.0)},
                                        {"stop", opt<double>(rep, "theta_stop", 40.0)},
                                        {"step", opt<double>(rep, "theta_step", 5.0)}});
    for (double t : run.report_theta)
        rs.angles.push_back({t, phi});
    run.report_freq = rs.frequencies_hz;
    EntropyObjective reporter(element, feeding, rs);
    const auto h = reporter.sample_entropies(run.ga.best);
    const std::size_t kk = rs.angles.size();
    run.entropy.assign(kk, std::vector<double>(run.report_freq.size()));
    run.min_mean_entropy = INFINITY;
    for (std::size_t l = 0; l < run.report_freq.size(); ++l)
    {
        double mean = 0.0;
        for (std::size_t k = 0; k < kk; ++k)
        {
            run.entropy[k][l] = h[l * kk + k];
            mean += h[l * kk + k];
        }
        run.min_mean_entropy = std::min(run.min_mean_entropy, mean / static_cast<double>(kk));
    }

    EntropyObjectiveSpec bs = base;
    bs.angles = {{0.0, 0.0}};
    bs.frequencies_hz = {spec.frequencies_hz[spec.frequencies_hz.size() / 2]};
    bs.weights.clear();
    const auto fields = EntropyObjective(element, feeding, bs).sample_fields(run.ga.best);
    for (const cplx& e : fields[0])
        run.broadside_phases.push_back(wrap_degrees(rad2deg(std::arg(e))));
    return run;
}

IndependenceReport cross_band_independence(const ArraySpec& mmwave, const std::vector<int>& mm_states,
                                           const SubElement& element, const GeometryVector& x,
                                           const IncidentWave& wave, const AngleGrid& grid, double epsilon)
{
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw Error(ErrorKind::InvalidInput, "coupling injection must be non-negative");
    if (!geometry_valid(x, element.y.ports()))
        throw Error(ErrorKind::InvalidInput, "geometry vector does not fit the element");

    const auto net = synthesize_network(mmwave, grid);
    const double f = mmwave.frequency_hz;
    const auto zl_mm = load_matrix(states_from_indices(mm_states, one_bit_alphabet()));
    const auto v_mm = open_circuit_voltages(net, wave);
    const auto base = superpose(net, port_currents(net.Z, zl_mm, v_mm));
    const auto base_db = magnitude_db(base.values());
    double peak = 0.0;
    for (const cplx& v : base.values())
        peak = std::max(peak, std::abs(v));

    const auto mm = static_cast<Eigen::Index>(net.size());
    const auto ne = static_cast<Eigen::Index>(element.port_positions.size());
    Eigen::MatrixXcd joint;
    Eigen::VectorXcd v_joint;
    if (epsilon > 0.0)
    {
        const double k = wavenumber(f);
        joint = Eigen::MatrixXcd::Zero(mm + ne, mm + ne);
        joint.topLeftCorner(mm, mm) = net.Z;
        joint.bottomRightCorner(ne, ne) = coupling_matrix(element.port_positions, f, element.coupling);
        for (Eigen::Index a = 0; a < mm; ++a)
        {
            for (Eigen::Index b = 0; b < ne; ++b)
            {
                const auto& pa = net.positions[static_cast<std::size_t>(a)];
                const auto& pb = element.port_positions[static_cast<std::size_t>(b)];
                const double kd = k * std::hypot(pa.x - pb.x, pa.y - pb.y);
                const cplx z = epsilon * mmwave.coupling.self_impedance * std::exp(cplx(0.0, -kd)) / std::max(kd, 1.0);
                joint(a, mm + b) = z;
                joint(mm + b, a) = z;
            }
        }
        check_passive(joint);
        v_joint.resize(mm + ne);
        v_joint.head(mm) = v_mm;
        v_joint.tail(ne) = open_circuit_voltages(element.port_positions, element.coupling.element_exponent, wave);
    }

    IndependenceReport rep;
    for (const auto& states : element_states(x))
    {
        Eigen::VectorXcd i_mm;
        if (epsilon == 0.0)
        {
            i_mm = port_currents(net.Z, zl_mm, v_mm);
        }
        else
        {
            Eigen::VectorXcd zl(mm + ne);
            zl.head(mm) = zl_mm;
            zl.tail(ne) = load_matrix(states);
            i_mm = port_currents(joint, zl, v_joint).head(mm);
        }
        const auto p = superpose(net, i_mm);
        double dev = 0.0;
        for (std::size_t g = 0; g < p.values().size(); ++g)
        {
            const double a = std::abs(p.values()[g]);
            const double db = a == 0.0 ? kDbFloor : std::max(kDbFloor, 20.0 * std::log10(a / peak));
            dev = std::max(dev, std::abs(db - base_db[g]));
        }
        rep.deviation_db.push_back(dev);
        rep.max_deviation_db = std::max(rep.max_deviation_db, dev);
    }
    return rep;
}

namespace
{

CommandOutput cmd_synth(const json& cfg)
{
    const auto spec = array_from_json(section(cfg, "array"));
    const auto grid = grid_from_json(cfg.value("grid", json::object()));
    const auto net = synthesize_network(spec, grid);
    CommandOutput out;
    out.files.emplace_back("network.json", dump(network_to_json(net)));
    for (std::size_t m = 0; m < net.size(); ++m)
    {
        char name[64];
        std::snprintf(name, sizeof name, "patterns/port_%03zu.csv", m);
        out.files.emplace_back(name, write_pattern_csv(net.port_patterns[m]));
    }
    out.files.emplace_back("patterns/oc.csv", write_pattern_csv(net.oc_pattern));
    out.message = std::to_string(net.size()) + "-port network";
    return out;
}

CommandOutput cmd_steer(const json& cfg)
{
    const auto band = opt<std::string>(cfg, "band", "mmwave");
    const auto spec = array_from_json(section(cfg, "array"));
    const auto grid = grid_from_json(cfg.value("grid", json::object()));
    const auto wave = incidence_from_json(cfg.value("incidence", json::object()), spec.frequency_hz);
    const auto targets = targets_from_json(cfg.value("targets", json::array()));
    const double cut = opt<double>(cfg, "cut_phi", 0.0);
    const int budget = opt<int>(cfg, "budget", 1000);

    PortNetwork net = [&] {
        if (band == "mmwave")
            return synthesize_network(spec, grid);
        if (band == "sub6")
            return reflective_array_network(spec, grid, wave);
        throw Error(ErrorKind::InvalidInput, "config: band must be 'mmwave' or 'sub6'");
    }();
    StateAlphabet alphabet = one_bit_alphabet();
    if (band == "sub6")
    {
        const auto& el = section(cfg, "element");
        alphabet = reflective_alphabet(req<std::vector<double>>(el, "phases_deg"),
                                       opt<double>(el, "reflection_magnitude", 0.9));
    }

    const auto rows = steering_report(net, alphabet, targets, wave, cut, budget);
    CommandOutput out;
    out.files.emplace_back("steering_report.csv", write_report_csv(rows));
    json books = json::array();
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        const auto& r = rows[i];
        json b = {{"index", i}, {"target_theta", r.target.theta_deg}, {"target_phi", r.target.phi_deg}};
        if (!r.ok)
        {
            b["error"] = r.error;
            books.push_back(b);
            continue;
        }
        b["states"] = r.codebook.states;
        b["method"] = r.codebook.method;
        b["accepted_flips"] = r.codebook.accepted_flips;
        books.push_back(b);
        worst = std::max(worst, r.pointing_error);
        const auto sr = scattered_pattern(net, states_from_indices(r.codebook.states, alphabet), wave);
        out.files.emplace_back(indexed("patterns/target_", i, ".csv"), write_pattern_csv(sr.pattern));
    }
    out.files.emplace_back("codebooks.json", dump(books));
    out.message = std::to_string(rows.size()) + " targets, worst pointing error " + fmt_double(worst) + " deg";
    return out;
}

CommandOutput cmd_optimize(const json& cfg, std::uint64_t seed)
{
    const auto run = run_topology(cfg, seed);
    CommandOutput out;

    json g = geometry_to_json(run.ga.best);
    g["fitness"] = run.ga.fitness;
    out.files.emplace_back("best_geometry.json", dump(g));

    std::string hist = "generation,best,mean,feasible_fraction\n";
    for (const auto& h : run.ga.history)
        hist += std::to_string(h.generation) + ',' + fmt_double(h.best) + ',' + fmt_double(h.mean) + ',' +
                fmt_double(h.feasible_fraction) + '\n';
    out.files.emplace_back("history.csv", hist);

    std::string ent = "theta_deg";
    for (double f : run.report_freq)
        ent += ",h_" + fmt_double(f);
    ent += '\n';
    for (std::size_t k = 0; k < run.report_theta.size(); ++k)
    {
        ent += fmt_double(run.report_theta[k]);
        for (double h : run.entropy[k])
            ent += ',' + fmt_double(h);
        ent += '\n';
    }
    out.files.emplace_back("entropy_vs_angle.csv", ent);

    json s = {{"objective", run.ga.fitness},
              {"evaluations", run.ga.evaluations},
              {"min_mean_entropy", run.min_mean_entropy},
              {"reference_level_bits", 2.2},
              {"broadside_phases_deg", run.broadside_phases}};
    out.files.emplace_back("summary.json", dump(s));
    out.message = "best mean entropy " + fmt_double(run.ga.fitness) + " bits";
    return out;
}

CommandOutput cmd_psi(const json& cfg)
{
    const auto& cs = section(cfg, "circuits");
    if (!cs.is_array() || cs.empty() || cs.size() > 2)
        throw Error(ErrorKind::InvalidInput, "config: 'circuits' needs one or two circuits");
    std::vector<PsiCircuit> circuits;
    for (const auto& c : cs)
        circuits.push_back(circuit_from_json(c));
    const auto& sw = section(cfg, "sweep");
    const FrequencySweep sweep{req<double>(sw, "start_hz"), req<double>(sw, "stop_hz"), req<int>(sw, "points")};
    sweep.validate();
    const auto f = sweep.frequencies();
    const auto s21 = circuits.size() == 1 ? two_port_isolation(circuits[0], sweep)
                                          : cascade(circuits[0], circuits[1], sweep);
    json info = json::array();
    for (const auto& c : circuits)
    {
        auto j = circuit_to_json(c);
        j["resonant_frequency_hz"] = resonant_frequency(c);
        info.push_back(j);
    }
    CommandOutput out;
    out.files.emplace_back("sweep.csv", write_sweep_csv(f, s21));
    out.files.emplace_back("circuits.json", dump(info));
    out.message = "worst |S21| " + fmt_double(*std::max_element(s21.begin(), s21.end())) + " dB";
    return out;
}

CommandOutput cmd_subtract(const json& cfg, const std::string& dir)
{
    const auto total = read_trace_csv(read_text_file(resolve(dir, req<std::string>(cfg, "total"))));
    const auto env = read_trace_csv(read_text_file(resolve(dir, req<std::string>(cfg, "env"))));
    const auto scat = background_subtract(total, env);
    CommandOutput out;
    out.files.emplace_back("scat.csv", write_trace_csv(scat));
    out.message = std::to_string(scat.values.size()) + " samples";
    return out;
}

CommandOutput cmd_independence(const json& cfg, const std::string& dir)
{
    const auto mm = array_from_json(section(cfg, "mmwave"));
    const auto element = element_from_json(section(cfg, "element"));
    const auto& gj = section(cfg, "geometry");
    const auto x = gj.is_string() ? geometry_from_json(parse_json(read_text_file(resolve(dir, gj.get<std::string>())),
                                                                  gj.get<std::string>()))
                                  : geometry_from_json(gj);
    const auto grid = grid_from_json(cfg.value("grid", json::object()));
    const auto wave = incidence_from_json(cfg.value("incidence", json::object()), mm.frequency_hz);
    const double eps = opt<double>(cfg, "epsilon", 0.0);
    const auto& tj = cfg.value("mmwave_target", json::object());
    const SteeringTarget target{{opt<double>(tj, "theta", 0.0), opt<double>(tj, "phi", 0.0)}, wave};
    const auto states = quantize_states(ideal_phase_profile(target, lattice_positions(mm.rows, mm.cols, mm.spacing_m),
                                                            mm.frequency_hz),
                                        one_bit_alphabet().phases_deg);

    const auto rep = cross_band_independence(mm, states, element, x, wave, grid, eps);
    std::string csv = "state,max_deviation_db\n";
    for (std::size_t s = 0; s < rep.deviation_db.size(); ++s)
        csv += std::to_string(s) + ',' + fmt_double(rep.deviation_db[s]) + '\n';
    CommandOutput out;
    out.files.emplace_back("independence.csv", csv);
    out.files.emplace_back("summary.json",
                           dump({{"epsilon", eps}, {"states", rep.deviation_db.size()},
                                 {"max_deviation_db", rep.max_deviation_db}}));
    out.message = "max deviation " + fmt_double(rep.max_deviation_db) + " dB";
    return out;
}

CommandOutput cmd_metrics(const json& cfg, const std::string& dir)
{
    const auto p = read_pattern_csv(read_text_file(resolve(dir, req<std::string>(cfg, "pattern"))));
    const double cut = opt<double>(cfg, "cut_phi", 0.0);
    const auto m = pattern_metrics(p, cut);
    json j = {{"peak_theta_deg", m.peak_direction.theta_deg},
              {"peak_phi_deg", m.peak_direction.phi_deg},
              {"peak_level_db", m.peak_level_db},
              {"sidelobe_level_db", m.sidelobe_level_db},
              {"half_power_beamwidth_deg", m.half_power_beamwidth_deg}};
    CommandOutput out;
    out.files.emplace_back("metrics.json", dump(j));
    out.message = "peak at theta " + fmt_double(m.peak_direction.theta_deg) + " deg";
    return out;
}

} // namespace

CommandOutput run_command(const std::string& verb, const json& cfg, const std::string& config_dir,
                          std::optional<std::uint64_t> seed_override)
{
    if (!cfg.is_object())
        throw Error(ErrorKind::InvalidInput, "config must be a JSON object");
    if (req<int>(cfg, "version") != kConfigVersion)
        throw Error(ErrorKind::InvalidInput, "config: unsupported version");
    const auto seed = config_seed(cfg, seed_override);

    if (verb == "synth-array")
        return cmd_synth(cfg);
    if (verb == "steer")
        return cmd_steer(cfg);
    if (verb == "optimize-topology")
        return cmd_optimize(cfg, seed);
    if (verb == "psi")
        return cmd_psi(cfg);
    if (verb == "subtract")
        return cmd_subtract(cfg, config_dir);
    if (verb == "independence")
        return cmd_independence(cfg, config_dir);
    if (verb == "metrics")
        return cmd_metrics(cfg, config_dir);
    throw Error(ErrorKind::InvalidInput, "unknown command '" + verb + "'");
}

void write_outputs(const CommandOutput& out, const std::string& out_dir)
{
    for (const auto& [name, text] : out.files)
    {
        const fs::path p = fs::path(out_dir) / name;
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
        std::ofstream f(p, std::ios::binary);
        if (!f || !(f << text) || !f.flush())
            throw Error(ErrorKind::InvalidInput, "cannot write '" + p.string() + "'");
    }
}

} // namespace dbris
