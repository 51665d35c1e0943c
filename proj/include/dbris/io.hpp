// SPDX-License-Identifier: Apache-2.0
//
// Text formats: pattern, trace, sweep and steering-report CSVs plus the
// geometry, network and circuit JSON documents. Writers return strings so
// callers decide when (and whether) anything touches the filesystem.

#ifndef DBRIS_IO_HPP
#define DBRIS_IO_HPP

#include "dbris/codebook.hpp"
#include "dbris/em_oracle.hpp"
#include "dbris/measurement.hpp"
#include "dbris/psi.hpp"
#include "dbris/topology.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace dbris
{

// Shortest text that reads back to the same double.
std::string fmt_double(double v);

std::string read_text_file(const std::string& path);

// theta_deg,phi_deg,re,im
std::string write_pattern_csv(const ComplexPattern& p);
ComplexPattern read_pattern_csv(const std::string& text);

// "# freq_hz=..", "# label=..", optional "# phi_deg=..", then theta_deg,re,im
std::string write_trace_csv(const S21Trace& t);
S21Trace read_trace_csv(const std::string& text);

// freq_hz,s21_db
std::string write_sweep_csv(const std::vector<double>& freq_hz, const std::vector<double>& s21_db);

// target_theta,achieved_theta,pointing_error,sll_db,peak_rel_db
std::string write_report_csv(const std::vector<SteeringRow>& rows);

nlohmann::json geometry_to_json(const GeometryVector& x);
GeometryVector geometry_from_json(const nlohmann::json& j);

nlohmann::json network_to_json(const PortNetwork& net);

PsiCircuit circuit_from_json(const nlohmann::json& j);
nlohmann::json circuit_to_json(const PsiCircuit& c);

// Parses JSON text; syntax errors become Parse errors naming line and column.
nlohmann::json parse_json(const std::string& text, const std::string& source);

} // namespace dbris

#endif
