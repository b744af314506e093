// Moments E tr(U_t^n) of unitary Brownian motion two ways: the explicit Biane
// sum, and the cycle contraction of the tensor heat kernel E[U_t^{(x)n}].

#include <cstdio>

#include "ubmlab/heat_kernel.hpp"

int main() {
    using namespace ubmlab;
    const std::size_t dim = 3;
    std::printf("%3s %6s %22s %22s\n", "n", "t", "Biane sum", "heat kernel");
    for (std::size_t n = 1; n <= 3; ++n) {
        for (double t : {0.25, 1.0, 4.0}) {
            const ComplexMatrix kernel = expected_tensor_power_ubm(n, dim, t).value;
            const Complex contracted =
                apply_permutation_left(Permutation::full_cycle(n), dim, kernel).trace() / static_cast<double>(dim);
            std::printf("%3zu %6.2f %22.16f %22.16f\n", n, t, biane_moment(n, dim, t), contracted.real());
        }
    }
}
