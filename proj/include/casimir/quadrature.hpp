// Gauss-Legendre rules and the (0,inf) -> (0,1) substitutions used by the
// imaginary-frequency integrals.
#ifndef CASIMIR_QUADRATURE_HPP
#define CASIMIR_QUADRATURE_HPP

#include <memory>
#include <vector>

namespace casimir {

enum class XiTransform { Log, Rational };

struct QuadratureSpec {
    double rel_tol = 1e-4;
    int max_levels = 8;
    XiTransform xi_transform = XiTransform::Rational;

    void validate() const; // 0 < rel_tol < 1, max_levels >= 4
};

// Nodes and weights on (0, 1).
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Cached rule of size n (n >= 1). Thread-safe.
std::shared_ptr<const GaussRule> gauss_rule(int n);

// Substitution u in (0,1) -> value in (0,inf) with scale s:
//   Rational: v = s u/(1-u),   dv = s/(1-u)^2 du
//   Log:      v = -s ln(1-u),  dv = s/(1-u)  du
struct MappedNode {
    double value;
    double jacobian;
};
MappedNode map_to_halfline(XiTransform t, double scale, double u);

} // namespace casimir

#endif
