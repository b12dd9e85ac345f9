#include <iostream>

#include "tg/suites.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return tg::cli_main(args, std::cout, std::cerr);
}
