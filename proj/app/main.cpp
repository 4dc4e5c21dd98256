#include <iostream>

#include "rbsn/cli.hpp"

int main(int argc, char** argv)
{
    return rbsn::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
