#include <iostream>

#include "dairyq/cli.hpp"

int main(int argc, char** argv) {
    return dairyq::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
