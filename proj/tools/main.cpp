#include <string>
#include <vector>

#include "tempergrid/cli.hpp"

int main(int argc, char** argv) {
    return tempergrid::run_cli(
        std::vector<std::string>(argv + 1, argv + argc));
}
