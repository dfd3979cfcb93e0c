#include <iostream>
#include <string>
#include <vector>

#include "cli_app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return rooflinebench::cli::run(args, std::cout, std::cerr);
}
