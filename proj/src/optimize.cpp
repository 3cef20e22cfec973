#include "spme/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace spme {

NelderMeadResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const NelderMeadOptions& options,
                             const Chart& chart) {
    const Eigen::Index d = x0.size();
    if (d == 0) throw std::invalid_argument("nelder_mead needs at least one coordinate");
    NelderMeadResult out;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++out.evaluations;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    auto measure = [&](const Eigen::VectorXd& x) { return chart ? chart(x) : x; };

    std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(d + 1), x0);
    std::vector<double> vals(pts.size());
    for (Eigen::Index i = 0; i < d; ++i) pts[static_cast<std::size_t>(i + 1)](i) += options.initial_step;
    for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = eval(pts[i]);

    std::vector<std::size_t> order(pts.size());
    auto sort = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    };
    auto diameter = [&] {
        const Eigen::VectorXd best = measure(pts[order[0]]);
        double dmax = 0.0;
        for (std::size_t i = 1; i < pts.size(); ++i) dmax = std::max(dmax, (measure(pts[order[i]]) - best).norm());
        return dmax;
    };

    sort();
    while (true) {
        if (std::isfinite(vals[order[0]]) && diameter() < options.tolerance) {
            out.converged = true;
            break;
        }
        if (out.evaluations >= options.max_evaluations) break;
        ++out.iterations;

        const std::size_t worst = order.back();
        const std::size_t second = order[order.size() - 2];
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += pts[order[i]];
        centroid /= static_cast<double>(d);

        const Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
        const double fr = eval(reflected);
        if (fr < vals[order[0]]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[worst]);
            const double fe = eval(expanded);
            if (fe < fr) {
                pts[worst] = expanded;
                vals[worst] = fe;
            } else {
                pts[worst] = reflected;
                vals[worst] = fr;
            }
        } else if (fr < vals[second]) {
            pts[worst] = reflected;
            vals[worst] = fr;
        } else {
            const bool outside = fr < vals[worst];
            const Eigen::VectorXd contracted =
                outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                        : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
            const double fc = eval(contracted);
            if (fc < (outside ? fr : vals[worst])) {
                pts[worst] = contracted;
                vals[worst] = fc;
            } else {
                const Eigen::VectorXd best = pts[order[0]];
                for (std::size_t i = 1; i < order.size(); ++i) {
                    pts[order[i]] = best + 0.5 * (pts[order[i]] - best);
                    vals[order[i]] = eval(pts[order[i]]);
                }
            }
        }
        sort();
    }
    out.x = pts[order[0]];
    out.value = vals[order[0]];
    return out;
}

}  // namespace spme
