#include "pathwise/stats.hpp"

#include "pathwise/errors.hpp"
#include "pathwise/numeric.hpp"

#include <cmath>
#include <limits>

namespace pathwise {

WeightedSums weighted_sums(std::span<const double> path, std::span<const double> a, double mu) {
    KahanSum u;
    KahanSum v;
    for (std::size_t j = 0; j < path.size(); ++j) {
        const double aj = a[j];
        const double dev = path[j] - mu;
        u.add(aj * path[j]);
        v.add(aj * aj * dev * dev);
    }
    return WeightedSums{u.value(), v.value()};
}

PathStats path_stats(std::span<const double> path, const Schedule& schedule, double mu) {
    if (path.size() != schedule.a().size()) {
        throw validation_error("path_stats: path length must equal schedule length");
    }
    const auto ws = weighted_sums(path, schedule.a(), mu);
    const auto em = measures(schedule);

    const double m = kahan_total(path) / double(path.size());
    KahanSum vs;
    for (double r : path) {
        const double d = r - m;
        vs.add(d * d);
    }

    PathStats out;
    out.u = ws.u;
    out.v_mu = ws.v;
    out.u_norm = em.e1 > 0.0 ? ws.u / em.e1 : std::numeric_limits<double>::quiet_NaN();
    out.v_norm = em.e2 > 0.0 ? ws.v / em.e2 : std::numeric_limits<double>::quiet_NaN();
    out.m = m;
    out.v_sample = vs.value();
    return out;
}

MeanVar ensemble_average(std::span<const PathStats> stats, PathField field) {
    if (stats.size() < 2) {
        throw validation_error("ensemble_average: needs at least two paths for a sample variance");
    }
    auto pick = [field](const PathStats& s) {
        return field == PathField::cumulative_return ? s.u : s.v_mu;
    };
    KahanSum total;
    for (const auto& s : stats) total.add(pick(s));
    const double mean = total.value() / double(stats.size());

    KahanSum sq;
    for (const auto& s : stats) {
        const double d = pick(s) - mean;
        sq.add(d * d);
    }
    return MeanVar{mean, sq.value() / double(stats.size() - 1)};
}

} // namespace pathwise
