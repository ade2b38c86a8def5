#include <iostream>

#include "fluxq/commands.hpp"

int main(int argc, char** argv) {
    return fluxq::run_cli(argc, argv, std::cout, std::cerr);
}
