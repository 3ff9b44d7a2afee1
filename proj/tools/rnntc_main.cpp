#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "rnntc/cli.hpp"

int main(int argc, char** argv) {
    try {
        return rnntc::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
