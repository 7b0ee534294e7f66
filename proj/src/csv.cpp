#include "casimir/csv.hpp"

#include <cctype>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "casimir/errors.hpp"

namespace casimir {

std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_header(const std::string& command) {
    return std::string("# casimir-gratings v") + kToolVersion + " " + command + "\n";
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_num(const std::string& s, int line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw parse_error("malformed numeric field '" + s + "'", line_no);
    }
}

} // namespace

void write_force_curve(std::ostream& out, const ForceCurve& curve, const std::string& command) {
    out << csv_header(command);
    for (const auto& disc : curve.discontinuities)
        out << "# discontinuity d_m=" << fmt_g17(disc.d) << " height_N=" << fmt_g17(disc.height)
            << "\n";
    out << "d_m,F_N,Fgrad_N_per_m,sigma_F_N\n";
    for (const auto& s : curve.samples)
        out << fmt_g17(s.d) << "," << fmt_g17(s.F) << "," << fmt_g17(s.F_grad) << ","
            << fmt_g17(s.sigma_F) << "\n";
}

ForceCurve read_force_curve(std::istream& in) {
    ForceCurve curve;
    std::string line;
    int line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            double d = 0.0, h = 0.0;
            if (std::sscanf(line.c_str(), "# discontinuity d_m=%lg height_N=%lg", &d, &h) == 2)
                curve.discontinuities.push_back({d, h});
            continue;
        }
        if (!saw_header) {
            if (line.rfind("d_m,", 0) != 0)
                throw parse_error("expected force-curve column header", line_no);
            saw_header = true;
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 4) throw parse_error("expected 4 columns", line_no);
        ForceSample s;
        s.d = parse_num(f[0], line_no);
        s.F = parse_num(f[1], line_no);
        s.F_grad = parse_num(f[2], line_no);
        s.sigma_F = parse_num(f[3], line_no);
        curve.samples.push_back(s);
    }
    if (!saw_header) throw parse_error("missing force-curve header", line_no ? line_no : 1);
    curve.validate();
    return curve;
}

void write_measurements(std::ostream& out, const std::vector<MeasurementRecord>& records,
                        const std::string& command) {
    out << csv_header(command);
    out << "v_comb_V,v_e_V,delta_omega_rad_s,sigma_rad_s\n";
    for (const auto& r : records)
        out << fmt_g17(r.v_comb) << "," << fmt_g17(r.v_e) << "," << fmt_g17(r.delta_omega) << ","
            << fmt_g17(r.sigma_omega) << "\n";
}

std::vector<MeasurementRecord> read_measurements(std::istream& in) {
    std::vector<MeasurementRecord> records;
    std::string line;
    int line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line.rfind("v_comb_V,", 0) != 0)
                throw parse_error("expected measurement column header", line_no);
            saw_header = true;
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 4) throw parse_error("expected 4 columns", line_no);
        records.push_back({parse_num(f[0], line_no), parse_num(f[1], line_no),
                           parse_num(f[2], line_no), parse_num(f[3], line_no)});
    }
    if (!saw_header) throw parse_error("missing measurement header", line_no ? line_no : 1);
    return records;
}

void write_calibration(std::ostream& out, const CalibrationResult& r,
                       const std::string& command) {
    out << csv_header(command);
    out << "# alpha_m_per_V2 " << fmt_g17(r.alpha) << " sigma " << fmt_g17(r.sigma_alpha) << "\n";
    out << "# k_N_per_m_s_rad " << fmt_g17(r.k) << " sigma " << fmt_g17(r.sigma_k) << "\n";
    out << "# cov_alpha_k " << fmt_g17(r.cov_alpha_k) << "\n";
    out << "# degenerate_excluded " << r.degenerate_excluded << "\n";
    out << "d_m,v0_V,sigma_v0_V\n";
    for (const auto& e : r.v0_table)
        out << fmt_g17(e.d) << "," << fmt_g17(e.v0) << "," << fmt_g17(e.sigma_v0) << "\n";
}

void write_rho(std::ostream& out, const std::vector<RhoPoint>& rho, const std::string& command) {
    out << csv_header(command);
    out << "d_m,rho\n";
    for (const auto& p : rho) {
        out << fmt_g17(p.d) << ",";
        if (p.unbounded)
            out << "unbounded\n";
        else
            out << fmt_g17(p.rho) << "\n";
    }
}

std::vector<XY> read_xy(std::istream& in) {
    std::vector<XY> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto f = split_csv(line);
        if (f.size() < 2) throw parse_error("expected 2 columns", line_no);
        // skip a single non-numeric header line
        try {
            const double x = parse_num(f[0], line_no);
            const double y = parse_num(f[1], line_no);
            out.push_back({x, y});
        } catch (const parse_error&) {
            if (out.empty() && line_no <= 2) continue;
            throw;
        }
    }
    return out;
}

} // namespace casimir
