#include <vector>
#include <string>

#include "nstr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return nstr::cli::main_entry(args);
}
