#include "qgraph/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qgraph/error.hpp"

namespace qgraph {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string Potential::type_name() const {
    return std::visit(overloaded{
                          [](const ZeroPotential&) { return std::string("zero"); },
                          [](const DeltaPotential&) { return std::string("delta"); },
                          [](const ConstantPotential&) { return std::string("constant"); },
                          [](const SmoothPotential&) { return std::string("expr"); },
                      },
                      v_);
}

std::string Potential::describe() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const ZeroPotential&) { os << "zero"; },
                   [&](const DeltaPotential& d) { os << "delta(D=" << d.strength << ", x0=" << d.position << ")"; },
                   [&](const ConstantPotential& c) { os << "constant(" << c.value << ")"; },
                   [&](const SmoothPotential& s) { os << "expr(" << s.expression.to_string() << ")"; },
               },
               v_);
    return os.str();
}

void Potential::validate(double length) const {
    if (const auto* d = std::get_if<DeltaPotential>(&v_)) {
        if (!std::isfinite(d->strength)) throw InputError("delta strength must be finite");
        if (!(d->position >= 0.0 && d->position <= length)) {
            throw InputError("delta position must lie in [0, L]");
        }
    } else if (const auto* c = std::get_if<ConstantPotential>(&v_)) {
        if (!std::isfinite(c->value)) throw InputError("constant potential must be finite");
    } else if (const auto* s = std::get_if<SmoothPotential>(&v_)) {
        constexpr int checks = 257;
        for (int i = 0; i < checks; ++i) {
            const double x = length * i / (checks - 1);
            if (!std::isfinite(s->expression(x))) {
                throw InputError("potential '" + s->expression.to_string() + "' is not finite at x=" +
                                 std::to_string(x));
            }
        }
    }
}

double eval_oriented(const Potential& w, Orientation orientation, double length, double x) {
    const double xs = orientation == Orientation::forward ? x : length - x;
    return std::visit(overloaded{
                          [](const ZeroPotential&) { return 0.0; },
                          [](const DeltaPotential&) -> double {
                              throw InputError(
                                  "delta potentials have no pointwise values; use the analytic edge solver");
                          },
                          [](const ConstantPotential& c) { return c.value; },
                          [&](const SmoothPotential& s) { return s.expression(xs); },
                      },
                      w.variant());
}

Jet2 jet_oriented(const Potential& w, Orientation orientation, double length, double x) {
    const bool reversed = orientation == Orientation::reverse;
    const double xs = reversed ? length - x : x;
    Jet2 j = std::visit(overloaded{
                            [](const ZeroPotential&) { return Jet2{}; },
                            [](const DeltaPotential&) -> Jet2 {
                                throw InputError(
                                    "delta potentials have no pointwise values; use the analytic edge solver");
                            },
                            [](const ConstantPotential& c) { return Jet2{c.value, 0.0, 0.0}; },
                            [&](const SmoothPotential& s) { return s.expression.jet(xs); },
                        },
                        w.variant());
    if (reversed) j.d1 = -j.d1;
    return j;
}

DeltaPotential oriented_delta(const Potential& w, Orientation orientation, double length) {
    const auto* d = std::get_if<DeltaPotential>(&w.variant());
    if (!d) throw InputError("oriented_delta called on a non-delta potential");
    if (orientation == Orientation::forward) return *d;
    return {d->strength, length - d->position};
}

PotentialNorms potential_norms(const Potential& w, double length, int samples) {
    PotentialNorms n;
    if (w.is_delta() || w.is_zero()) return n;
    double sum_sq = 0.0;
    n.max_value = -INFINITY;
    for (int i = 0; i < samples; ++i) {
        const double x = length * i / (samples - 1);
        const double v = eval_oriented(w, Orientation::forward, length, x);
        n.sup = std::max(n.sup, std::abs(v));
        n.max_value = std::max(n.max_value, v);
        // trapezoid weights
        const double weight = (i == 0 || i == samples - 1) ? 0.5 : 1.0;
        sum_sq += weight * v * v;
    }
    n.sup_positive = std::max(0.0, n.max_value);
    n.l2 = std::sqrt(sum_sq * length / (samples - 1));
    return n;
}

}  // namespace qgraph
