#include <iostream>

#include "pia3c/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pia3c::run_cli(args, std::cout, std::cerr);
}
