#include <string>
#include <vector>

#include "netctrl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return netctrl::cli::run(args);
}
