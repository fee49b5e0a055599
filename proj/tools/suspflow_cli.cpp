#include <iostream>
#include <string>
#include <vector>

#include "suspflow/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return suspflow::dispatch(args, std::cout, std::cerr);
}
