#include "grasp/experiment.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return grasp::run_cli(argc, argv, std::cout, std::cerr);
}
