#include <iostream>

#include "omnigraph/cli.hpp"

int main(int argc, char** argv) {
    return omnigraph::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
