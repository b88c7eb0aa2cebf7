#include "hedgesym/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return hedgesym::cli::run(argc, argv, std::cout, std::cerr);
}
