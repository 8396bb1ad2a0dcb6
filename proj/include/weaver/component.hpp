#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "weaver/rng.hpp"

namespace weaver {

enum class ComponentKind { point, twopoint, uniform_interval };

/// A population with closed-form mean and variance, used as H0 or H1. Point
/// components consume no randomness when drawn; the other kinds consume
/// exactly one uniform per observation.
class ComponentSpec {
public:
    static ComponentSpec point(double c) { return ComponentSpec(ComponentKind::point, c, c, 0.0); }

    /// Two-point mass: value x1 with probability q, else x0.
    static ComponentSpec twopoint(double x0, double x1, double q) {
        return ComponentSpec(ComponentKind::twopoint, x0, x1, q);
    }

    static ComponentSpec uniform_interval(double a, double b) {
        return ComponentSpec(ComponentKind::uniform_interval, a, b, 0.0);
    }

    /// Grammar: "point:c" | "twopoint:x0,x1,q" | "uniform:a,b".
    static ComponentSpec parse(const std::string& text) {
        const auto colon = text.find(':');
        const std::string kind = text.substr(0, colon);
        std::vector<double> args;
        if (colon != std::string::npos) {
            std::istringstream rest(text.substr(colon + 1));
            std::string field;
            while (std::getline(rest, field, ',')) {
                std::size_t used = 0;
                double value = 0.0;
                try {
                    value = std::stod(field, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != field.size())
                    throw std::invalid_argument("bad number '" + field + "' in component spec '" +
                                                text + "'");
                args.push_back(value);
            }
        }
        if (kind == "point" && args.size() == 1) return point(args[0]);
        if (kind == "twopoint" && args.size() == 3) return twopoint(args[0], args[1], args[2]);
        if (kind == "uniform" && args.size() == 2) return uniform_interval(args[0], args[1]);
        throw std::invalid_argument("bad component spec '" + text +
                                    "' (expected point:c | twopoint:x0,x1,q | uniform:a,b)");
    }

    ComponentKind kind() const { return kind_; }
    double mean() const { return mean_; }
    double variance() const { return variance_; }
    double support_min() const { return kind_ == ComponentKind::twopoint ? std::min(a_, b_) : a_; }
    double support_max() const { return kind_ == ComponentKind::twopoint ? std::max(a_, b_) : b_; }

    double draw(Engine& g) const {
        switch (kind_) {
            case ComponentKind::point: return a_;
            case ComponentKind::twopoint: return u01(g) < q_ ? b_ : a_;
            case ComponentKind::uniform_interval: return a_ + (b_ - a_) * u01(g);
        }
        return a_;
    }

    /// The population of (X - shift) / scale.
    ComponentSpec transformed(double shift, double scale) const {
        if (scale == 0.0) throw std::invalid_argument("component transform: scale must be nonzero");
        const double a = (a_ - shift) / scale;
        const double b = (b_ - shift) / scale;
        switch (kind_) {
            case ComponentKind::point: return point(a);
            case ComponentKind::twopoint: return twopoint(a, b, q_);
            case ComponentKind::uniform_interval:
                return uniform_interval(std::min(a, b), std::max(a, b));
        }
        return point(a);
    }

    std::string describe() const {
        std::ostringstream out;
        switch (kind_) {
            case ComponentKind::point: out << "point:" << a_; break;
            case ComponentKind::twopoint: out << "twopoint:" << a_ << "," << b_ << "," << q_; break;
            case ComponentKind::uniform_interval: out << "uniform:" << a_ << "," << b_; break;
        }
        return out.str();
    }

private:
    ComponentSpec(ComponentKind kind, double a, double b, double q)
        : kind_(kind), a_(a), b_(b), q_(q) {
        if (!std::isfinite(a_) || !std::isfinite(b_) || !std::isfinite(q_))
            throw std::invalid_argument("component parameters must be finite");
        switch (kind_) {
            case ComponentKind::point:
                mean_ = a_;
                variance_ = 0.0;
                break;
            case ComponentKind::twopoint:
                if (q_ < 0.0 || q_ > 1.0)
                    throw std::invalid_argument("twopoint weight must be in [0, 1]");
                mean_ = (1.0 - q_) * a_ + q_ * b_;
                variance_ = q_ * (1.0 - q_) * (b_ - a_) * (b_ - a_);
                break;
            case ComponentKind::uniform_interval:
                if (a_ > b_)
                    throw std::invalid_argument("uniform interval needs a <= b");
                mean_ = 0.5 * (a_ + b_);
                variance_ = (b_ - a_) * (b_ - a_) / 12.0;
                break;
        }
    }

    ComponentKind kind_;
    double a_;
    double b_;
    double q_;
    double mean_ = 0.0;
    double variance_ = 0.0;
};

/// Affinely maps a pair with distinct means onto means (0, 1); variances are
/// rescaled by 1/(mu1 - mu0)^2.
inline std::pair<ComponentSpec, ComponentSpec> standardize(const ComponentSpec& h0,
                                                           const ComponentSpec& h1) {
    const double spread = h1.mean() - h0.mean();
    if (spread == 0.0)
        throw std::invalid_argument("standardize: component means must differ");
    return {h0.transformed(h0.mean(), spread), h1.transformed(h0.mean(), spread)};
}

inline void require_standard_means(const ComponentSpec& h0, const ComponentSpec& h1) {
    if (h0.mean() != 0.0 || h1.mean() != 1.0)
        throw std::invalid_argument(
            "component pair must have means (0, 1); run standardize() first (got mu0 = " +
            std::to_string(h0.mean()) + ", mu1 = " + std::to_string(h1.mean()) + ")");
}

} // namespace weaver
