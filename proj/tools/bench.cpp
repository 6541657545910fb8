// Compares the serial reference path (workers = 1) against the OpenMP path
// for ensemble training and test-set scoring, and checks that both produce
// bit-identical results.

#include "puforge/dataset.hpp"
#include "puforge/ensemble.hpp"
#include "puforge/parallel.hpp"

#include <chrono>
#include <cstdio>
#include <vector>

using namespace puforge;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

int main(int argc, char** argv) {
    const std::size_t n_models = argc > 1 ? std::stoul(argv[1]) : 50;
    const int max_workers = argc > 2 ? std::stoi(argv[2]) : resolve_workers(0);

    const Dataset train_data = generate_synthetic(200, 400, 7);
    const Dataset test_data = generate_synthetic(2000, 2000, 8);
    const std::vector<Instance> p = train_data.positives();
    std::vector<Instance> u;
    for (const Instance& inst : train_data.instances()) {
        if (inst.observed_label() == Label::Negative) u.push_back(inst.with_observed(Label::Unlabeled));
    }

    ResvmParams params;
    params.n_models = n_models;
    params.n_pos = 100;
    params.n_unl = 200;
    params.c_u = 1.0;
    params.w_pos = 2.0;
    params.kernel = KernelSpec::rbf(0.5);
    params.seed = 99;

    std::printf("ensemble: %zu members, train 200P/400U, score %zu instances\n", n_models,
                test_data.size());

    auto t0 = std::chrono::steady_clock::now();
    const EnsembleModel reference = train_resvm(p, u, params, 1);
    const double train_serial = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const std::vector<double> ref_scores = decision_values(reference, test_data.instances(), 1);
    const double score_serial = seconds_since(t0);

    std::printf("%-10s %12s %12s %10s\n", "workers", "train (s)", "score (s)", "identical");
    std::printf("%-10d %12.3f %12.3f %10s\n", 1, train_serial, score_serial, "ref");

    for (int workers = 2; workers <= max_workers; workers *= 2) {
        t0 = std::chrono::steady_clock::now();
        const EnsembleModel parallel_model = train_resvm(p, u, params, workers);
        const double train_par = seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        const std::vector<double> par_scores =
            decision_values(parallel_model, test_data.instances(), workers);
        const double score_par = seconds_since(t0);

        bool identical = par_scores.size() == ref_scores.size();
        for (std::size_t i = 0; identical && i < ref_scores.size(); ++i) {
            identical = par_scores[i] == ref_scores[i];
        }
        std::printf("%-10d %12.3f %12.3f %10s\n", workers, train_par, score_par,
                    identical ? "yes" : "NO");
        if (!identical) return 1;
    }
    return 0;
}
