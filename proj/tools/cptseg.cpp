#include <string>
#include <vector>

#include "cptseg/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cptseg::cli::run(args);
}
