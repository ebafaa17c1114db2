#include <iostream>
#include <string>
#include <vector>

#include "fpwm/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return fpwm::cli::run_command(args, std::cout, std::cerr);
}
