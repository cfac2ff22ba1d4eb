#include <iostream>
#include <string>
#include <vector>

#include "rydpol/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return rydpol::dispatch(args, std::cout, std::cerr);
}
