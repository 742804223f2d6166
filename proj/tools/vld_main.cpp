#include <vector>
#include <string>

#include "vld/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return vld::cli_main(args);
}
