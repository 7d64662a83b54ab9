#pragma once
// Lazy i.i.d. scenery over the integer lattice. Values are pure functions
// of (seed, label, site), so the scenery extends in either direction
// without replay and two walks over it see identical values.

#include <cstdint>
#include <vector>

#include "rwrs/dist.hpp"
#include "rwrs/rng.hpp"

namespace rwrs {

class Scenery {
  public:
    Scenery(Seed seed, std::string_view label, DistSpec dist)
        : stream_(seed, label), dist_(dist) {}

    double value(std::int64_t x) const { return dist_.at_site(stream_, x); }

    std::vector<double> window(std::int64_t lo, std::int64_t hi) const {
        if (hi < lo) throw std::invalid_argument("Scenery::window: hi < lo");
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(hi - lo + 1));
        for (std::int64_t x = lo; x <= hi; ++x) out.push_back(value(x));
        return out;
    }

    const DistSpec& dist() const { return dist_; }
    const RandomStream& stream() const { return stream_; }

  private:
    RandomStream stream_;
    DistSpec dist_;
};

}  // namespace rwrs
