#include <string>
#include <vector>

#include "gencl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gencl::cli::run_command(args);
}
