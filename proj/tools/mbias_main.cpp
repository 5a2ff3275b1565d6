#include "mbias/pipeline.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return mbias::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
