#include <iostream>

#include "nluforge/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return nluforge::run_cli(args, std::cout, std::cerr);
}
