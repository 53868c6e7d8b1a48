#include <iostream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "rankfolio/learners.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rankfolio::cli::run(args, std::cout, std::cerr, rankfolio::LearnerRegistry::defaults());
}
