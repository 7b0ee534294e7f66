// Versioned CSV emission and parsing. All quantities are SI base units and
// column names carry them. Output is byte-deterministic.
#ifndef CASIMIR_CSV_HPP
#define CASIMIR_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "casimir/analysis.hpp"
#include "casimir/calibration.hpp"
#include "casimir/force_curve.hpp"

namespace casimir {

inline constexpr const char* kToolVersion = "0.1.0";

std::string fmt_g17(double v);
std::string csv_header(const std::string& command); // "# casimir-gratings v... <command>"

void write_force_curve(std::ostream& out, const ForceCurve& curve, const std::string& command);
ForceCurve read_force_curve(std::istream& in);

void write_measurements(std::ostream& out, const std::vector<MeasurementRecord>& records,
                        const std::string& command);
std::vector<MeasurementRecord> read_measurements(std::istream& in);

void write_calibration(std::ostream& out, const CalibrationResult& result,
                       const std::string& command);

void write_rho(std::ostream& out, const std::vector<RhoPoint>& rho, const std::string& command);

// 2-column numeric CSV (optional '#' comments and one optional header line)
std::vector<XY> read_xy(std::istream& in);

} // namespace casimir

#endif
