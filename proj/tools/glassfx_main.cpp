#include <string>
#include <vector>

#include "glassfx/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return glassfx::cli::run(args);
}
