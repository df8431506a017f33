#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return ipcw::cli::dispatch(argc, argv, std::cout, std::cerr); }
