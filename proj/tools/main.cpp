#include <string>
#include <vector>

#include "alignforge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return alignforge::cli::run(args);
}
