// Runs BOLT for 120 virtual seconds on the drifting 1-d bump and prints the
// regret as it goes.
#include <iostream>

#include "bolt/bolt.hpp"

int main() {
    bolt::Benchmark bench = bolt::make_benchmark("drift1d");
    bolt::GroundTruth truth(bench);

    bolt::OptimizerConfig cfg;
    cfg.algorithm = bolt::AlgorithmKind::Bolt;
    cfg.refit_every = 5;
    cfg.compute_model = [](long n) { return 0.01 + 1e-6 * static_cast<double>(n) * n * n; };
    cfg.seed = 7;
    bolt::Optimizer opt(cfg, bench.dim());
    bolt::SimulatedClock clock;

    double cumulative = 0.0;
    long k = 0;
    while (clock.now() < 120.0) {
        const auto s = opt.step(bench, clock);
        const double r = truth.instantaneous_regret(s.query.x, s.query.t).value;
        cumulative += r;
        ++k;
        if (k % 20 == 0)
            std::cout << "t=" << bolt::format_double(s.query.t) << " |D|=" << s.dataset_size
                      << " regret=" << bolt::format_double(r) << '\n';
    }
    std::cout << "iterations=" << k << " average regret=" << bolt::format_double(cumulative / k) << '\n';
}
