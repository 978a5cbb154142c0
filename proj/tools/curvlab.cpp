#include <string>
#include <vector>

#include "curvlab/pipelines.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) {
        std::cout << curvlab::cli_usage();
        return 2;
    }
    return curvlab::run_command(args);
}
