#include "thermoflow/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return thermoflow::run_cli(argc, argv, std::cout, std::cerr);
}
