// Monte Carlo estimate of F_1(t) = E tr(R U_t S U_t^*) against its closed form
// e^{-t}(xi - alpha beta) + alpha beta, for N = 4, R = diag(1,1,1,-1),
// S = diag(1,-1,-1,-1).

#include <cstdio>

#include "ubmlab/heat_kernel.hpp"
#include "ubmlab/mc.hpp"

int main() {
    using namespace ubmlab;
    McConfig cfg;
    cfg.paths = 5000;
    cfg.grid = TimeGrid(1.0, 1000);
    cfg.master_seed = 7;
    cfg.fixture = FixtureSpec{4, 3, 1, false, 0};
    cfg.threads = 0;
    const auto pair = cfg.pair();
    std::printf("alpha = %.2f, beta = %.2f, xi = %.2f\n", pair.alpha(), pair.beta(), pair.xi());
    std::printf("%6s %14s %12s %14s\n", "t", "MC mean", "std err", "closed form");
    for (double t : {0.0, 0.25, 0.5, 1.0}) {
        const Estimate e = estimate_F(1, t, cfg);
        std::printf("%6.2f %14.6f %12.2e %14.6f\n", t, e.mean.real(), e.se(), f1_closed_form(pair, t));
    }
}
