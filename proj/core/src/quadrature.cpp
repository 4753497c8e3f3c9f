#include "qgraph/quadrature.hpp"

#include <cmath>
#include <boost/math/quadrature/gauss.hpp>

#include "qgraph/error.hpp"

namespace qgraph {

QuadratureRule composite_gauss_legendre(double a, double b, double max_panel_width) {
    if (!(b > a) || !(max_panel_width > 0.0)) throw InputError("quadrature needs a < b and a positive panel width");
    using Rule = boost::math::quadrature::gauss<double, gauss_points_per_panel>;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();

    QuadratureRule rule;
    rule.panels = static_cast<std::size_t>(std::ceil((b - a) / max_panel_width));
    rule.panel_width = (b - a) / static_cast<double>(rule.panels);
    rule.nodes.reserve(rule.panels * gauss_points_per_panel);
    rule.weights.reserve(rule.panels * gauss_points_per_panel);
    const double half = 0.5 * rule.panel_width;
    for (std::size_t p = 0; p < rule.panels; ++p) {
        const double mid = a + (static_cast<double>(p) + 0.5) * rule.panel_width;
        // abscissae are stored for the nonnegative half (no zero node for an even count)
        for (std::size_t i = x.size(); i-- > 0;) {
            rule.nodes.push_back(mid - half * x[i]);
            rule.weights.push_back(half * w[i]);
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            rule.nodes.push_back(mid + half * x[i]);
            rule.weights.push_back(half * w[i]);
        }
    }
    return rule;
}

}  // namespace qgraph
