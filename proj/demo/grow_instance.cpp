// Start from the most balanced partition at a small modulus and grow the
// solved instance one vertex per iteration. Usage: grow_instance [start_p] [iterations]

#include <cstdlib>
#include <iostream>

#include "bhr/harness.hpp"

int main(int argc, char** argv) {
    const std::int32_t start_p = argc > 1 ? std::atoi(argv[1]) : 8;
    const std::int32_t iterations = argc > 2 ? std::atoi(argv[2]) : 6;
    if (start_p < 2 || iterations < 1) {
        std::cerr << "usage: grow_instance [start_p >= 2] [iterations >= 1]\n";
        return 1;
    }
    bhr::EvolveRunOptions opt;
    opt.iterations = iterations;
    opt.human_log = &std::cout;
    try {
        return bhr::run_evolution(start_p, opt).all_success ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
