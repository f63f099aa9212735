#include <iostream>

#include "substoch/cli.hpp"

int main(int argc, char** argv)
{
    return substoch::cli::run(argc, argv, std::cout, std::cerr);
}
