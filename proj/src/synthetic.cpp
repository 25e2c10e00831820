#include "sicmos/synthetic.hpp"

#include <random>

#include "sicmos/parallel.hpp"
#include "sicmos/sweep.hpp"

namespace sicmos {

MeasurementSet synthesize_full_plane(const ModelParams& p, const SyntheticPlan& plan) {
    struct Bias {
        double vgs;
        double vds;
        const char* tag;
    };
    std::vector<Bias> biases;
    for (double vds : {0.005, 0.01, 0.02, 0.05, 0.1, 0.5}) {
        for (double vgs : make_grid(2.0, 20.0, 121, GridScale::linear)) biases.push_back({vgs, vds, "tracer"});
    }
    for (double vgs : {6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0}) {
        for (double vds : make_grid(0.6, 15.0, 40, GridScale::linear)) biases.push_back({vgs, vds, "pulsed"});
    }
    for (double vds : {5.0, 10.0}) {
        for (double vgs : make_grid(4.0, 20.0, 65, GridScale::linear)) biases.push_back({vgs, vds, "pulsed"});
    }
    for (double vgs : make_grid(6.0, 20.0, 29, GridScale::linear)) {
        for (double vds : make_grid(20.0, 800.0, 30, GridScale::log)) biases.push_back({vgs, vds, "dpt"});
    }
    for (double vds : {100.0, 400.0, 800.0}) {
        for (double vgs : make_grid(5.0, 20.0, 31, GridScale::linear)) biases.push_back({vgs, vds, "dpt"});
    }

    std::vector<BiasSolution> solved(biases.size());
    parallel_for(biases.size(), plan.threads, [&](std::size_t i) {
        solved[i] = solve_bias_point(p, {biases[i].vgs, biases[i].vds, plan.t_case});
    });

    std::mt19937_64 rng(plan.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    MeasurementSet set;
    std::vector<std::tuple<double, double>> seen;
    for (std::size_t i = 0; i < biases.size(); ++i) {
        const double noise = 1.0 + plan.noise * gauss(rng);
        if (!solved[i].converged || solved[i].id < plan.min_current) continue;
        if (std::find(seen.begin(), seen.end(), std::tuple{biases[i].vgs, biases[i].vds}) != seen.end()) continue;
        seen.emplace_back(biases[i].vgs, biases[i].vds);
        MeasurementRecord r;
        r.vgs = biases[i].vgs;
        r.vds = biases[i].vds;
        r.id = solved[i].id * noise;
        r.t_case = plan.t_case;
        r.pulsed = true;
        r.source_tag = biases[i].tag;
        set.records.push_back(std::move(r));
    }
    return partition_regions(std::move(set));
}

}  // namespace sicmos
