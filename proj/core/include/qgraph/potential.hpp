#pragma once

#include <string>
#include <variant>

#include "qgraph/expression.hpp"

namespace qgraph {

struct ZeroPotential {};

/// D * delta(x - position), position measured from the edge's initial vertex.
struct DeltaPotential {
    double strength = 0.0;
    double position = 0.0;
};

struct ConstantPotential {
    double value = 0.0;
};

struct SmoothPotential {
    Expression expression;
};

/// Orientation of a directed edge relative to the edge's stored coordinate.
enum class Orientation { forward, reverse };

/// Real edge potential. Stored in the edge's forward coordinate; the reverse
/// orientation sees w(L - x).
class Potential {
public:
    using Variant = std::variant<ZeroPotential, DeltaPotential, ConstantPotential, SmoothPotential>;

    Potential() = default;
    Potential(ZeroPotential p) : v_(p) {}
    Potential(DeltaPotential p) : v_(p) {}
    Potential(ConstantPotential p) : v_(p) {}
    Potential(SmoothPotential p) : v_(std::move(p)) {}

    static Potential zero() { return ZeroPotential{}; }
    static Potential delta(double strength, double position) { return DeltaPotential{strength, position}; }
    static Potential constant(double value) { return ConstantPotential{value}; }
    static Potential smooth(std::string_view source) { return SmoothPotential{Expression::parse(source)}; }

    [[nodiscard]] const Variant& variant() const { return v_; }

    [[nodiscard]] bool is_zero() const { return std::holds_alternative<ZeroPotential>(v_); }
    [[nodiscard]] bool is_delta() const { return std::holds_alternative<DeltaPotential>(v_); }
    [[nodiscard]] bool is_constant() const { return std::holds_alternative<ConstantPotential>(v_); }
    [[nodiscard]] bool is_smooth() const { return std::holds_alternative<SmoothPotential>(v_); }

    /// True when the edge equation has a closed-form solution (zero, delta, constant).
    [[nodiscard]] bool is_analytic() const { return !is_smooth(); }

    /// "zero", "delta", "constant" or "expr".
    [[nodiscard]] std::string type_name() const;

    /// Human-readable description, e.g. "delta(D=2, x0=0.3)".
    [[nodiscard]] std::string describe() const;

    /// Throws InputError unless the potential is admissible on an edge of length L.
    void validate(double length) const;

private:
    Variant v_;
};

/// w_d(x) for the directed orientation; x in [0, L]. Throws InputError for a
/// delta potential (use oriented_delta and the analytic edge path instead).
[[nodiscard]] double eval_oriented(const Potential& w, Orientation orientation, double length, double x);

/// w_d, w_d', w_d'' at x for non-delta potentials.
[[nodiscard]] Jet2 jet_oriented(const Potential& w, Orientation orientation, double length, double x);

/// Delta metadata seen from the given orientation: position L - x0 when reversed.
[[nodiscard]] DeltaPotential oriented_delta(const Potential& w, Orientation orientation, double length);

/// Sampling-based norms of a pointwise potential over [0, L] (4096 uniform samples).
struct PotentialNorms {
    double sup = 0.0;           // sup |w|
    double sup_positive = 0.0;  // sup max(w, 0)
    double max_value = 0.0;     // sup w (may be negative)
    double l2 = 0.0;            // ||w||_{L^2}
};

/// Norms for zero/constant/smooth; for delta returns zeros (no pointwise values).
[[nodiscard]] PotentialNorms potential_norms(const Potential& w, double length, int samples = 4096);

}  // namespace qgraph
