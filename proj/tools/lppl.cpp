#include <iostream>
#include <string>
#include <vector>

#include "lppl/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    return lppl::cli::run(args, std::cout, std::cerr);
}
