#pragma once

// File formats.
//
// Sequence files are CSV with one leading JSON header line prefixed by '#':
//
//   # {"format":"csa-sequence","version":1,"d":2,"m":1.0,"R":0.02,"N":2,
//   #  "beta":[300,500] or null,"seed":7 or null,"generator":"...",
//   #  "resolution":0.0004,"jammed":true,"shortfall":false,"counts":true}
//   index,x,y,count
//   0,0.1234,-0.4411,0
//   ...
//
// Rows are in acceptance order, index runs 0..l-1, the coordinate columns are
// x, y, z truncated to d, and the count column is present iff "counts" is true.
// Coordinates carry 17 significant digits, so binary64 values round-trip.
//
// Reports are JSON objects with "schema" (the report kind) and
// "schema_version" fields.

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "csa/asymptotics.hpp"
#include "csa/estimator.hpp"
#include "csa/simulator.hpp"
#include "csa/trajectory.hpp"

namespace csa {

inline constexpr int kSequenceFormatVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

void write_sequence(std::ostream& out, const PointSequence& seq);
void write_sequence(const std::filesystem::path& path, const PointSequence& seq);
PointSequence read_sequence(std::istream& in);
PointSequence read_sequence(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const CsaParams& p);
void from_json(const nlohmann::json& j, CsaParams& p);
void to_json(nlohmann::json& j, const Trajectory& t);
void from_json(const nlohmann::json& j, Trajectory& t);
void to_json(nlohmann::json& j, const MleResult& r);
void from_json(const nlohmann::json& j, MleResult& r);
void to_json(nlohmann::json& j, const ConfidenceIntervals& ci);
void from_json(const nlohmann::json& j, ConfidenceIntervals& ci);
void to_json(nlohmann::json& j, const CltReport& r);
void from_json(const nlohmann::json& j, CltReport& r);
void to_json(nlohmann::json& j, const LimitCurves& c);
void from_json(const nlohmann::json& j, LimitCurves& c);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

void write_report(const std::filesystem::path& path, const MleResult& r);
void write_report(const std::filesystem::path& path, const ConfidenceIntervals& ci);
void write_report(const std::filesystem::path& path, const CltReport& r);
// Also writes the curves as CSV next to the JSON (same stem, .csv):
// lambda,step,gamma_0..gamma_N,rho_0..rho_N
void write_report(const std::filesystem::path& path, const LimitCurves& c);
void write_curves_csv(std::ostream& out, const LimitCurves& c);

}  // namespace csa
