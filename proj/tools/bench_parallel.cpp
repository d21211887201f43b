/**
 * @file bench_parallel.cpp
 * @brief Wall-clock comparison of the OpenMP paths against their serial
 *        references: Monte Carlo path generation and the per-strike smile
 *        loop. Both pairs must produce bit-identical tables.
 */

#include "deltasmile/model.hpp"
#include "deltasmile/oracle.hpp"
#include "deltasmile/pricing.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chrono = std::chrono;
using deltasmile::model::ModelParams;

namespace {

long long ms_since(chrono::high_resolution_clock::time_point t0) {
    return chrono::duration_cast<chrono::milliseconds>(
               chrono::high_resolution_clock::now() - t0)
        .count();
}

} // namespace

int main() {
    ModelParams params;
    params.delta = 1.0;
    params.beta = 0.5;
    params.nu = 0.3;
    params.rho = -0.3;
    const double tau = 0.25;
    const double f0 = 1.0;
    const double sigma0 = 0.2;

#ifdef _OPENMP
    const int max_threads = omp_get_max_threads();
#else
    const int max_threads = 1;
#endif
    std::cout << "threads available: " << max_threads << "\n";

    // --- Monte Carlo path generation -------------------------------------
    deltasmile::oracle::SimConfig sim;
    sim.n_paths = 200000;
    sim.n_steps = 100;
    sim.seed = 42;

#ifdef _OPENMP
    omp_set_num_threads(1);
#endif
    auto t0 = chrono::high_resolution_clock::now();
    const auto serial_paths =
        deltasmile::oracle::simulate(params, tau, f0, sigma0, sim);
    std::cout << "simulate serial (" << sim.n_paths << " x " << sim.n_steps
              << "): time " << ms_since(t0) << " ms\n";

#ifdef _OPENMP
    omp_set_num_threads(max_threads);
#endif
    t0 = chrono::high_resolution_clock::now();
    const auto parallel_paths =
        deltasmile::oracle::simulate(params, tau, f0, sigma0, sim);
    std::cout << "simulate parallel: time " << ms_since(t0) << " ms\n";

    bool identical = serial_paths.size() == parallel_paths.size();
    for (std::size_t i = 0; identical && i < serial_paths.size(); ++i)
        identical = serial_paths[i].F == parallel_paths[i].F &&
                    serial_paths[i].Sigma == parallel_paths[i].Sigma;
    std::cout << "simulate tables identical: " << (identical ? "yes" : "NO")
              << "\n";

    // --- smile curve over a dense strike grid -----------------------------
    std::vector<double> strikes;
    for (int k = 0; k < 400; ++k)
        strikes.push_back(0.5 * std::exp(0.003466 * k));  // 0.5 .. ~2.0

    t0 = chrono::high_resolution_clock::now();
    const auto serial_curve = deltasmile::pricing::smile_curve(
        params, tau, f0, sigma0, strikes, 0, /*parallel=*/false);
    std::cout << "smile serial (" << strikes.size() << " strikes): time "
              << ms_since(t0) << " ms\n";

    t0 = chrono::high_resolution_clock::now();
    const auto parallel_curve = deltasmile::pricing::smile_curve(
        params, tau, f0, sigma0, strikes, 0, /*parallel=*/true);
    std::cout << "smile parallel: time " << ms_since(t0) << " ms\n";

    identical = serial_curve.size() == parallel_curve.size();
    double checksum = 0.0;
    for (std::size_t i = 0; identical && i < serial_curve.size(); ++i) {
        identical = serial_curve[i].sigma_implied == parallel_curve[i].sigma_implied &&
                    serial_curve[i].ok == parallel_curve[i].ok;
        checksum += serial_curve[i].sigma_implied;
    }
    std::cout << "smile tables identical: " << (identical ? "yes" : "NO")
              << "\nchecksum " << checksum << "\n";
    return identical ? 0 : 1;
}
