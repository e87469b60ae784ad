#include "cli.hpp"

int main(int argc, char** argv) { return wcm::cli::run(argc, argv, std::cout, std::cerr); }
