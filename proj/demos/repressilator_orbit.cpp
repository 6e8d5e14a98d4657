// Repressilator with Hill exponent 2 and beta * c = 3: loop gain against K_u for a range of
// total delays, then the periodic orbit for the first delay past the border.
#include <cstdio>

#include "cycdde/cycdde.hpp"

using namespace cycdde;

int main() {
    std::printf("%6s %12s %12s\n", "T", "K", "K/K_u");
    double chosen = 0.0;
    for (double T : {0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0}) {
        const auto tr = to_unidirectional(repressilator_preset(T, 2.0, 1.0, 3.0));
        const double ratio = tr.K / K_u(tr.system.mu(), 1.0);
        std::printf("%6.2f %12.6g %12.6g\n", T, tr.K, ratio);
        if (chosen == 0.0 && ratio > 1.0) chosen = T;
    }
    if (chosen == 0.0) return 0;

    const auto net = repressilator_preset(chosen, 2.0, 1.0, 3.0);
    const auto tr = to_unidirectional(net);
    const auto res = find_orbit(tr.system);
    const auto& o = res.orbit;
    std::printf("\nT = %g: converged = %s, period %.8f (gene time %.8f), V = 1 on samples: %s\n", chosen,
                o.converged ? "yes" : "no", o.period, o.period * tr.total_delay,
                o.verification.v_equals_one ? "yes" : "no");
    if (!o.converged) return 1;

    const auto& eq = tr.equilibrium;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        double lo = 1e300, hi = -1e300;
        for (const auto& x : o.curve) {
            const double v = tr.to_gene(k, x[k]);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const auto& var = tr.variables[k];
        const double star = var.protein ? eq.p[var.index - 1] : eq.r[var.index - 1];
        std::printf("%c%zu  range [%.6f, %.6f]  equilibrium %.6f  bound %.6f\n", var.protein ? 'p' : 'r', var.index, lo,
                    hi, star, gene_upper_bound(net, var.column()));
    }
    return 0;
}
