#include <iostream>
#include <string>
#include <vector>

#include "chinpaint/cli.hpp"

int main(int argc, char** argv) {
  return chinpaint::cli_main(std::vector<std::string>(argv, argv + argc), std::cerr);
}
