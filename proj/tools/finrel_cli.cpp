#include <cstdio>
#include <string>
#include <vector>

#include "finrel/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    finrel::cli::CliResult result = finrel::cli::run(args);
    std::fputs(result.report.c_str(), result.code >= 64 ? stderr : stdout);
    return result.code;
}
