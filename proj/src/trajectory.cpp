#include "svo/trajectory.hpp"

#include <cmath>

namespace svo {

namespace {
constexpr double kBoundSlack = 1e-12;
}

Trajectory simulate(const PlantModel& model, const Vec& x0, const std::vector<double>& v,
                    const std::vector<double>& w) {
    if (v.size() != w.size())
        throw DisturbanceOutOfBounds("simulate: v and w must have equal length");
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (std::abs(v[j]) > 1.0 + kBoundSlack || std::abs(w[j]) > 1.0 + kBoundSlack)
            throw DisturbanceOutOfBounds("simulate: disturbance exceeds unit bound at step " +
                                         std::to_string(j + 1));
    }

    const auto& est = model.est;
    Trajectory t;
    t.x0 = x0;
    t.v = v;
    t.w = w;

    Vec x = x0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double y = est.C_row.dot(x) + est.D1 * v[j];
        x = est.A * x + est.B_col * v[j];
        t.x.push_back(x);
        t.y.push_back(y);
        t.z.push_back(y + w[j]);
    }

    // Cross-check the recursion against the closed form
    // x_k = A^k x0 + sum_j A^j B v_{k-j}.
    Vec closed = x0;
    Vec input = Vec::Zero(x0.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        closed = est.A * closed;
        input = est.A * input + est.B_col * v[j];
        const double err = (t.x[j] - (closed + input)).cwiseAbs().maxCoeff();
        if (err > 1e-9 * std::max(1.0, t.x[j].cwiseAbs().maxCoeff()))
            throw PlantError("simulate: closed form deviates from recursion");
    }

    return t;
}

std::vector<double> reconstruct_w(const PlantModel& model, const Vec& x0,
                                  const std::vector<double>& v,
                                  const std::vector<double>& z) {
    if (v.size() != z.size())
        throw DisturbanceOutOfBounds("reconstruct_w: v and z must have equal length");

    const auto& est = model.est;
    std::vector<double> w(v.size());
    Vec x = x0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        w[j] = z[j] - est.C_row.dot(x) - est.D1 * v[j];
        x = est.A * x + est.B_col * v[j];
    }
    return w;
}

std::pair<std::vector<double>, std::vector<double>> sample_disturbances(std::uint64_t seed,
                                                                        int k,
                                                                        DisturbanceLaw law) {
    SplitMix64 master(seed);
    SplitMix64 v_stream(master.next());
    SplitMix64 w_stream(master.next());

    auto draw = [&](SplitMix64& g) {
        if (law == DisturbanceLaw::Vertex)
            return (g.next() & 1ULL) ? 1.0 : -1.0;
        return 2.0 * g.next_unit() - 1.0;
    };

    std::vector<double> v(k), w(k);
    for (int j = 0; j < k; ++j)
        v[j] = draw(v_stream);
    for (int j = 0; j < k; ++j)
        w[j] = draw(w_stream);
    return {std::move(v), std::move(w)};
}

}  // namespace svo
