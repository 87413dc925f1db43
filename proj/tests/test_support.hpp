#pragma once

#include <cmath>

#include "svo/plant.hpp"
#include "svo/trajectory.hpp"

namespace svo::testing {

inline Vec make_vec(std::initializer_list<double> xs) {
    Vec v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs)
        v(i++) = x;
    return v;
}

// Random coprime causal plant with the estimator poles inside radius 0.9 and
// away from the origin, so d_{m+1} stays well clear of zero.
inline PlantModel random_plant(SplitMix64& rng, int m) {
    auto unit = [&] { return 2.0 * rng.next_unit() - 1.0; };
    for (int attempt = 0; attempt < 200; ++attempt) {
        Vec d(m + 1);
        d(0) = 1.0;
        if (m == 1) {
            const double r = (0.15 + 0.75 * rng.next_unit()) * (unit() > 0 ? 1.0 : -1.0);
            d(1) = -r;  // pole of the companion matrix at r
        } else if (m == 2) {
            if (rng.next_unit() < 0.5) {
                const double rad = 0.2 + 0.7 * rng.next_unit();
                const double ang = M_PI * rng.next_unit();
                d(1) = -2.0 * rad * std::cos(ang);
                d(2) = rad * rad;
            } else {
                const double r1 = (0.15 + 0.75 * rng.next_unit()) * (unit() > 0 ? 1.0 : -1.0);
                const double r2 = (0.15 + 0.75 * rng.next_unit()) * (unit() > 0 ? 1.0 : -1.0);
                d(1) = -(r1 + r2);
                d(2) = r1 * r2;
            }
        } else {
            for (int i = 1; i <= m; ++i)
                d(i) = 0.6 * unit();
            d(m) = (std::abs(d(m)) < 0.1 ? (d(m) < 0 ? -0.3 : 0.3) : d(m));
        }
        Vec n(m + 1);
        for (int i = 0; i <= m; ++i)
            n(i) = unit();
        try {
            return make_plant_model(n, d, 1e-6);
        } catch (const PlantError&) {
            continue;
        }
    }
    throw std::runtime_error("random_plant: could not sample a valid plant");
}

}  // namespace svo::testing
