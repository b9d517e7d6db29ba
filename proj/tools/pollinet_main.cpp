#include <string>
#include <vector>

#include "pollinet/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return pollinet::run_cli(std::move(args));
}
