#include <vector>
#include <string>

#include "pslab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pslab::cli::run(args);
}
