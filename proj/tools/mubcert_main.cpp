#include <iostream>
#include <string>
#include <vector>

#include "mubcert/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mubcert::run_cli(args, std::cout, std::cerr);
}
