// Walk every frequency partition for one modulus, realize its representative
// multiset, and print the familiar verification log. Usage: realize_fps [p]

#include <cstdlib>
#include <iostream>

#include "bhr/harness.hpp"

int main(int argc, char** argv) {
    const std::int32_t p = argc > 1 ? std::atoi(argv[1]) : 12;
    if (p < 2) {
        std::cerr << "usage: realize_fps [p >= 2]\n";
        return 1;
    }
    const bhr::ProblemInstance inst(p);
    bhr::VerifyOptions opt;
    opt.human_log = &std::cout;
    const bhr::VerifySummary summary = bhr::verify_all(inst, opt);
    return summary.solved == summary.total ? 0 : 1;
}
