#include <iostream>

#include "narwhal/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return narwhal::runCli(args, std::cout, std::cerr);
}
