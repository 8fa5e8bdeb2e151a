#include <iostream>

#include "loopsec/cli.hpp"

int main(int argc, char** argv) {
    return loopsec::cli_entry(argc, argv, std::cout, std::cerr);
}
