#pragma once
// Scenery value distributions: centered, unit variance. A spec names the
// law; sampling is addressable by site so sceneries are lazy and
// order-independent.

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rwrs/rng.hpp"

namespace rwrs {

enum class DistKind { Rademacher, StandardGaussian, UniformSym, TwoPoint };

// TwoPoint(a, p): raw support {a, b} with P(a)=p chosen so the mean is 0,
// then scaled to unit variance. Requires a > 0, 0 < p < 1.
struct DistSpec {
    DistKind kind = DistKind::Rademacher;
    double a = 1.0;
    double p = 0.5;

    bool bounded() const {
        return kind != DistKind::StandardGaussian;
    }

    bool two_valued() const {
        return kind == DistKind::Rademacher || kind == DistKind::TwoPoint;
    }

    // Support after centering/scaling, for two-valued kinds.
    // hi > 0 > lo, P(hi) = p_hi, and p_hi*hi + (1-p_hi)*lo = 0.
    struct TwoPointSupport {
        double hi, lo, p_hi;
    };
    TwoPointSupport support() const {
        switch (kind) {
            case DistKind::Rademacher:
                return {1.0, -1.0, 0.5};
            case DistKind::TwoPoint: {
                // raw: {a w.p. p, b w.p. 1-p}, b = -a p/(1-p); sd = a sqrt(p/(1-p))
                const double hi = std::sqrt((1.0 - p) / p);
                const double lo = -std::sqrt(p / (1.0 - p));
                return {hi, lo, p};
            }
            default:
                throw std::logic_error("support(): not a two-valued law");
        }
    }

    double fourth_moment() const {
        switch (kind) {
            case DistKind::Rademacher:
                return 1.0;
            case DistKind::StandardGaussian:
                return 3.0;
            case DistKind::UniformSym:
                return 9.0 / 5.0;  // E U^4 for U uniform on [-sqrt(3), sqrt(3)]
            case DistKind::TwoPoint: {
                const auto s = support();
                return s.p_hi * std::pow(s.hi, 4) + (1.0 - s.p_hi) * std::pow(s.lo, 4);
            }
        }
        throw std::logic_error("fourth_moment: bad kind");
    }

    // Value at a site, addressed by the folded site counter. Gaussian sites
    // take the first member of the Box-Muller pair at pair index u.
    double value_at(const RandomStream& s, std::uint64_t u) const {
        switch (kind) {
            case DistKind::Rademacher:
                return (s.word_at(u) >> 63) ? 1.0 : -1.0;
            case DistKind::StandardGaussian: {
                double z0, z1;
                s.normal_pair_at(u, z0, z1);
                return z0;
            }
            case DistKind::UniformSym:
                return std::sqrt(3.0) * (2.0 * s.uniform_at(u) - 1.0);
            case DistKind::TwoPoint: {
                const auto sp = support();
                return s.uniform_at(u) < sp.p_hi ? sp.hi : sp.lo;
            }
        }
        throw std::logic_error("value_at: bad kind");
    }

    double at_site(const RandomStream& s, std::int64_t x) const {
        return value_at(s, detail::fold_site(x));
    }

    std::string name() const {
        switch (kind) {
            case DistKind::Rademacher:
                return "rademacher";
            case DistKind::StandardGaussian:
                return "gaussian";
            case DistKind::UniformSym:
                return "uniform";
            case DistKind::TwoPoint:
                return "twopoint:a=" + format_param(a) + ",p=" + format_param(p);
        }
        return "?";
    }

  private:
    static std::string format_param(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", v);
        return buf;
    }
};

// Grammar: kind[:k=v,k=v]. Kinds: rademacher | gaussian | uniform |
// twopoint (params a, p).
inline DistSpec parse_dist(std::string_view text) {
    std::string_view head = text;
    std::string_view params;
    if (const auto colon = text.find(':'); colon != std::string_view::npos) {
        head = text.substr(0, colon);
        params = text.substr(colon + 1);
    }
    DistSpec d;
    if (head == "rademacher")
        d.kind = DistKind::Rademacher;
    else if (head == "gaussian")
        d.kind = DistKind::StandardGaussian;
    else if (head == "uniform")
        d.kind = DistKind::UniformSym;
    else if (head == "twopoint")
        d.kind = DistKind::TwoPoint;
    else
        throw std::invalid_argument("unknown distribution '" + std::string(head) + "'");

    std::map<std::string, double> kv;
    while (!params.empty()) {
        auto item = params;
        if (const auto comma = params.find(','); comma != std::string_view::npos) {
            item = params.substr(0, comma);
            params = params.substr(comma + 1);
        } else {
            params = {};
        }
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("distribution parameter needs key=value: '" +
                                        std::string(item) + "'");
        const std::string key(item.substr(0, eq));
        std::size_t used = 0;
        const std::string valtext(item.substr(eq + 1));
        double val;
        try {
            val = std::stod(valtext, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad numeric value for '" + key + "'");
        }
        if (used != valtext.size())
            throw std::invalid_argument("bad numeric value for '" + key + "'");
        kv[key] = val;
    }
    if (d.kind == DistKind::TwoPoint) {
        if (kv.count("a")) d.a = kv.at("a"), kv.erase("a");
        if (kv.count("p")) d.p = kv.at("p"), kv.erase("p");
        if (!(d.a > 0.0)) throw std::invalid_argument("twopoint: need a > 0");
        if (!(d.p > 0.0 && d.p < 1.0)) throw std::invalid_argument("twopoint: need 0 < p < 1");
    }
    if (!kv.empty())
        throw std::invalid_argument("unexpected distribution parameter '" + kv.begin()->first +
                                    "'");
    return d;
}

}  // namespace rwrs
