#include <iostream>
#include <string>
#include <vector>

#include "flow/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return flow::cli::main(args, std::cout, std::cerr);
}
