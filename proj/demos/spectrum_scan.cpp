// Leading characteristic roots of the unit-rate loop x_j' = -x_j + ..., tau = 1,
// as the loop gain K crosses the borders K_c and K_u.
#include <cstdio>
#include <vector>

#include "cycdde/cycdde.hpp"

using namespace cycdde;

int main() {
    for (std::size_t N : {1, 2, 3}) {
        const std::vector<double> mu(N, 1.0);
        const double ku = K_u(mu, 1.0), kc = K_c(mu, 1.0);
        std::printf("N = %zu  omega1 = %.10f  K_u = %.10f  K_c = %.10f\n", N, omega1(mu, 1.0), ku, kc);
        std::printf("%10s %14s %14s %6s\n", "K/K_u", "sigma0", "omega", "A1");
        for (double r : {0.05, 0.25, 0.5, 0.9, 0.99, 1.01, 1.1, 1.5, 2.0}) {
            const auto a1 = verify_a1(CharFunction::unidirectional(mu, r * ku, 1.0), 4.0);
            std::printf("%10.3f %14.8f %14.8f %6s\n", r, a1.sigma0, a1.omega, a1.holds ? "yes" : "no");
        }
        std::printf("\n");
    }
    return 0;
}
