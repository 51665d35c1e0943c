// SPDX-License-Identifier: Apache-2.0
#include "dbris/io.hpp"

#include "dbris/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace dbris
{

namespace
{

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line)
    {
        if (c == sep)
        {
            out.push_back(cur);
            cur.clear();
        }
        else if (c != '\r')
        {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, int line)
{
    std::size_t b = s.find_first_not_of(" \t");
    std::size_t e = s.find_last_not_of(" \t");
    if (b == std::string::npos)
        throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": empty number");
    const std::string t = s.substr(b, e - b + 1);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": bad number '" + t + "'");
    return v;
}

std::vector<std::vector<double>> read_numeric_rows(const std::string& text, const std::string& header,
                                                   std::map<std::string, std::string>* meta)
{
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool seen_header = false;
    std::vector<std::vector<double>> rows;
    const auto ncols = split(header, ',').size();
    while (std::getline(in, line))
    {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#')
        {
            const auto eq = line.find('=');
            if (meta && eq != std::string::npos)
            {
                std::string key = line.substr(1, eq - 1);
                key.erase(0, key.find_first_not_of(' '));
                (*meta)[key] = line.substr(eq + 1);
            }
            continue;
        }
        if (!seen_header)
        {
            if (line != header)
                throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": expected header '" + header + "'");
            seen_header = true;
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != ncols)
            throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": expected " + std::to_string(ncols) +
                                              " columns");
        std::vector<double> row;
        for (const auto& c : cells)
            row.push_back(parse_double(c, lineno));
        rows.push_back(std::move(row));
    }
    if (!seen_header)
        throw Error(ErrorKind::Parse, "missing header '" + header + "'");
    return rows;
}

// Distinct sorted values and their common step.
std::pair<std::vector<double>, double> axis(std::vector<double> v, double fallback_step)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) <= 1e-9; }), v.end());
    const double step = v.size() > 1 ? v[1] - v[0] : fallback_step;
    return {v, step};
}

} // namespace

std::string fmt_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::InvalidInput, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string write_pattern_csv(const ComplexPattern& p)
{
    std::string out = "theta_deg,phi_deg,re,im\n";
    for (std::size_t g = 0; g < p.grid().size(); ++g)
    {
        const auto d = p.grid().direction(g);
        const cplx v = p.values()[g];
        out += fmt_double(d.theta_deg) + ',' + fmt_double(d.phi_deg) + ',' + fmt_double(v.real()) + ',' +
               fmt_double(v.imag()) + '\n';
    }
    return out;
}

ComplexPattern read_pattern_csv(const std::string& text)
{
    const auto rows = read_numeric_rows(text, "theta_deg,phi_deg,re,im", nullptr);
    if (rows.empty())
        throw Error(ErrorKind::Parse, "pattern file has no samples");
    std::vector<double> th;
    std::vector<double> ph;
    for (const auto& r : rows)
    {
        th.push_back(r[0]);
        ph.push_back(r[1]);
    }
    auto [theta, ts] = axis(th, 1.0);
    auto [phi, ps] = axis(ph, 90.0);
    AngleGrid grid(theta, phi, ts, ps);
    if (rows.size() != grid.size())
        throw Error(ErrorKind::Parse, "pattern file does not cover a full theta x phi grid");
    std::vector<cplx> values(grid.size());
    std::vector<bool> filled(grid.size(), false);
    for (const auto& r : rows)
    {
        const auto idx = grid.find({r[0], r[1]});
        if (!idx || filled[*idx])
            throw Error(ErrorKind::Parse, "pattern file has duplicate or misplaced samples");
        filled[*idx] = true;
        values[*idx] = {r[2], r[3]};
    }
    return ComplexPattern(std::move(grid), std::move(values));
}

std::string write_trace_csv(const S21Trace& t)
{
    std::string out = "# freq_hz=" + fmt_double(t.frequency_hz) + "\n# label=" + to_string(t.label) +
                      "\n# phi_deg=" + fmt_double(t.phi_deg) + "\ntheta_deg,re,im\n";
    for (std::size_t i = 0; i < t.theta_deg.size(); ++i)
        out += fmt_double(t.theta_deg[i]) + ',' + fmt_double(t.values[i].real()) + ',' + fmt_double(t.values[i].imag()) +
               '\n';
    return out;
}

S21Trace read_trace_csv(const std::string& text)
{
    std::map<std::string, std::string> meta;
    const auto rows = read_numeric_rows(text, "theta_deg,re,im", &meta);
    S21Trace t;
    if (!meta.count("freq_hz") || !meta.count("label"))
        throw Error(ErrorKind::Parse, "trace needs '# freq_hz=' and '# label=' header lines");
    t.frequency_hz = parse_double(meta["freq_hz"], 0);
    t.label = parse_trace_label(meta["label"]);
    if (meta.count("phi_deg"))
        t.phi_deg = parse_double(meta["phi_deg"], 0);
    for (const auto& r : rows)
    {
        t.theta_deg.push_back(r[0]);
        t.values.emplace_back(r[1], r[2]);
    }
    t.validate();
    return t;
}

std::string write_sweep_csv(const std::vector<double>& f, const std::vector<double>& s21)
{
    std::string out = "freq_hz,s21_db\n";
    for (std::size_t i = 0; i < f.size(); ++i)
        out += fmt_double(f[i]) + ',' + fmt_double(s21[i]) + '\n';
    return out;
}

std::string write_report_csv(const std::vector<SteeringRow>& rows)
{
    std::string out = "target_theta,achieved_theta,pointing_error,sll_db,peak_rel_db\n";
    for (const auto& r : rows)
    {
        if (!r.ok)
        {
            out += fmt_double(r.target.theta_deg) + ",nan,nan,nan,nan\n";
            continue;
        }
        out += fmt_double(r.target.theta_deg) + ',' + fmt_double(r.achieved_theta) + ',' + fmt_double(r.pointing_error) +
               ',' + fmt_double(r.sll_db) + ',' + fmt_double(r.peak_rel_db) + '\n';
    }
    return out;
}

nlohmann::json geometry_to_json(const GeometryVector& x)
{
    std::string bits;
    for (auto b : x.x0)
        bits.push_back(b ? '1' : '0');
    nlohmann::json sw = nlohmann::json::array();
    for (const auto& s : x.switches)
        sw.push_back({{"port", s.port}, {"anode_side", s.anode_side}});
    return {{"x0", bits}, {"switches", sw}};
}

GeometryVector geometry_from_json(const nlohmann::json& j)
{
    try
    {
        GeometryVector x;
        for (char c : j.at("x0").get<std::string>())
        {
            if (c != '0' && c != '1')
                throw Error(ErrorKind::Parse, "x0 must be a string of 0/1");
            x.x0.push_back(c == '1' ? 1 : 0);
        }
        for (const auto& s : j.at("switches"))
            x.switches.push_back({s.at("port").get<int>(), s.at("anode_side").get<int>()});
        return x;
    }
    catch (const nlohmann::json::exception& e)
    {
        throw Error(ErrorKind::Parse, std::string("geometry: ") + e.what());
    }
}

nlohmann::json network_to_json(const PortNetwork& net)
{
    nlohmann::json z = nlohmann::json::array();
    for (Eigen::Index r = 0; r < net.Z.rows(); ++r)
        for (Eigen::Index c = 0; c < net.Z.cols(); ++c)
            z.push_back({net.Z(r, c).real(), net.Z(r, c).imag()});
    nlohmann::json pos = nlohmann::json::array();
    for (const auto& p : net.positions)
        pos.push_back({p.x, p.y});
    const auto& g = net.grid();
    return {{"ports", net.size()},
            {"frequency_hz", net.frequency_hz},
            {"element_exponent", net.element_exponent},
            {"Z", z},
            {"port_positions", pos},
            {"grid",
             {{"theta", std::vector<double>(g.theta().begin(), g.theta().end())},
              {"phi", std::vector<double>(g.phi().begin(), g.phi().end())},
              {"theta_step", g.theta_step()},
              {"phi_step", g.phi_step()}}}};
}

PsiCircuit circuit_from_json(const nlohmann::json& j)
{
    try
    {
        PsiCircuit c;
        c.L_S = j.at("L_S").get<double>();
        c.C_SP = j.at("C_SP").get<double>();
        c.L_V = j.at("L_V").get<double>();
        c.R = j.value("R", 0.0);
        c.validate();
        return c;
    }
    catch (const nlohmann::json::exception& e)
    {
        throw Error(ErrorKind::Parse, std::string("circuit: ") + e.what());
    }
}

nlohmann::json circuit_to_json(const PsiCircuit& c)
{
    return {{"L_S", c.L_S}, {"C_SP", c.C_SP}, {"L_V", c.L_V}, {"R", c.R}};
}

nlohmann::json parse_json(const std::string& text, const std::string& source)
{
    try
    {
        return nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error& e)
    {
        int line = 1;
        int col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < stop; ++i)
        {
            if (text[i] == '\n')
            {
                ++line;
                col = 1;
            }
            else
            {
                ++col;
            }
        }
        throw Error(ErrorKind::Parse, source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                          ": JSON syntax error");
    }
}

} // namespace dbris
