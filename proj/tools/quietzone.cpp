#include <string>
#include <vector>

#include "qz/cli.hpp"

int main(int argc, char** argv) {
  return qz::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
