#include "pyramid/enumerate.hpp"

namespace pyramid {

Optimum enumerate_optimum(const Problem& problem, std::uint64_t limit) {
    const int n = problem.length();
    double space = 1.0;
    for (int g = 0; g < n; ++g) space *= static_cast<double>(problem.alleles(g).size());
    if (space > static_cast<double>(limit)) throw ConfigurationError("search space too large to enumerate");

    Optimum best;
    std::vector<std::size_t> digit(static_cast<std::size_t>(n), 0);
    Genes genes(static_cast<std::size_t>(n));
    for (int g = 0; g < n; ++g) genes[static_cast<std::size_t>(g)] = problem.alleles(g)[0];
    const Sense sense = problem.sense();
    while (true) {
        const Evaluation e = problem.evaluate_full(genes);
        ++best.evaluated;
        if (e.feasible()) {
            ++best.feasible;
            if (!best.best_raw || better(sense, e.raw, *best.best_raw)) {
                best.best_raw = e.raw;
                best.genes = genes;
            }
        }
        int g = 0;
        for (; g < n; ++g) {
            const auto alleles = problem.alleles(g);
            auto& d = digit[static_cast<std::size_t>(g)];
            if (++d < alleles.size()) {
                genes[static_cast<std::size_t>(g)] = alleles[d];
                break;
            }
            d = 0;
            genes[static_cast<std::size_t>(g)] = alleles[0];
        }
        if (g == n) break;
    }
    return best;
}

} // namespace pyramid
