// Error taxonomy shared by the library and the CLI exit-code mapping.
#ifndef CASIMIR_ERRORS_HPP
#define CASIMIR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace casimir {

// Bad inputs: malformed files, invalid parameters, violated preconditions.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Text parse failure; carries the 1-based line number of the offense.
struct parse_error : input_error {
    int line;
    parse_error(const std::string& msg, int line_no)
        : input_error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
};

// Quadrature failed to reach the requested tolerance; carries the last two
// estimates so callers can judge how bad the stall is.
struct convergence_error : std::runtime_error {
    double last_estimate;
    double previous_estimate;
    convergence_error(const std::string& msg, double last, double prev)
        : std::runtime_error(msg), last_estimate(last), previous_estimate(prev) {}
};

// Geometry in contact or overlapping; carries the offending displacement.
struct contact_error : std::runtime_error {
    double displacement;
    contact_error(const std::string& msg, double d)
        : std::runtime_error(msg), displacement(d) {}
};

} // namespace casimir

#endif
