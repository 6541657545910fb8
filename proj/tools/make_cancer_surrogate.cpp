// Writes data/cancer.txt: a stand-in for the Wisconsin breast-cancer file
// with the same shape (683 instances, 10 integer-valued features in 1..10,
// labels 4 = malignant / 2 = benign, 239/444 class split) and a comparable
// degree of class separation. Features are correlated within class through a
// shared latent severity factor. Deterministic; regenerate with no arguments.

#include "puforge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

int main(int argc, char** argv) {
    const char* path = argc > 1 ? argv[1] : "data/cancer.txt";

    // per-feature class means modeled on the published feature statistics
    const double benign_mean[10] = {2.9, 1.3, 1.4, 1.3, 2.1, 1.3, 2.1, 1.2, 1.1, 1.0};
    const double malignant_mean[10] = {7.2, 6.6, 6.6, 5.5, 5.3, 7.6, 6.0, 5.9, 2.6, 1.5};

    puforge::Rng rng(20140611);

    struct Row {
        int label;
        int features[10];
    };
    std::vector<Row> rows;

    auto emit = [&](int label, const double* mean, double factor_load, double noise_sd) {
        Row row;
        row.label = label;
        const double severity = rng.next_normal();
        for (int j = 0; j < 10; ++j) {
            const double raw = mean[j] + factor_load * severity + noise_sd * rng.next_normal();
            row.features[j] = std::clamp(static_cast<int>(std::lround(raw)), 1, 10);
        }
        rows.push_back(row);
    };

    for (int i = 0; i < 444; ++i) emit(2, benign_mean, 0.6, 0.9);
    for (int i = 0; i < 239; ++i) emit(4, malignant_mean, 1.6, 1.9);

    // deterministic shuffle so the classes are interleaved like the original
    for (std::size_t i = rows.size(); i > 1; --i) {
        std::swap(rows[i - 1], rows[rng.next_below(i)]);
    }

    std::ofstream out(path);
    if (!out) {
        std::fprintf(stderr, "cannot open %s\n", path);
        return 1;
    }
    for (const Row& row : rows) {
        out << row.label;
        for (int j = 0; j < 10; ++j) {
            out << " " << (j + 1) << ":" << row.features[j];
        }
        out << "\n";
    }
    std::printf("wrote %zu instances to %s\n", rows.size(), path);
    return 0;
}
