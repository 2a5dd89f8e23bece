#include <string>
#include <vector>

#include "pspin/cli.hpp"

int main(int argc, char** argv) {
  return pspin::cli::main(std::vector<std::string>(argv + 1, argv + argc));
}
