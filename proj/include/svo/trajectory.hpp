#pragma once

#include <cstdint>
#include <vector>

#include "svo/plant.hpp"

namespace svo {

struct DisturbanceOutOfBounds : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One realization of the estimation system: states, plant outputs and
// measurements generated step by step from x0 and the disturbance pair.
struct Trajectory {
    Vec x0;
    std::vector<double> v;
    std::vector<double> w;
    std::vector<Vec> x;  // x[j] is the state after step j+1
    std::vector<double> y;
    std::vector<double> z;

    int steps() const { return static_cast<int>(v.size()); }
    const Vec& state(int k) const { return k == 0 ? x0 : x[k - 1]; }
};

Trajectory simulate(const PlantModel& model, const Vec& x0, const std::vector<double>& v,
                    const std::vector<double>& w);

// Measurement-noise history implied by (x0, v, z); satisfies z = y + w.
std::vector<double> reconstruct_w(const PlantModel& model, const Vec& x0,
                                  const std::vector<double>& v,
                                  const std::vector<double>& z);

enum class DisturbanceLaw { Uniform, Vertex };

// SplitMix64. Outputs are mapped to [0,1) via the top 53 bits, which keeps
// every draw identical across platforms.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t s = (state_ += 0x9e3779b97f4a7c15ULL);
        s = (s ^ (s >> 30)) * 0xbf58476d1ce4e5b9ULL;
        s = (s ^ (s >> 27)) * 0x94d049bb133111ebULL;
        return s ^ (s >> 31);
    }

    double next_unit() {  // [0, 1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
};

// Streams are split deterministically: the master SplitMix64(seed) emits the
// v-stream seed first and the w-stream seed second, so the two sequences are
// independent of each other and of k.
std::pair<std::vector<double>, std::vector<double>> sample_disturbances(std::uint64_t seed,
                                                                        int k,
                                                                        DisturbanceLaw law);

}  // namespace svo
