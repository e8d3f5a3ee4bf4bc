#include <iostream>

#include "cli.h"

int main(int argc, char** argv) {
  twirlkit::cli::Result r = twirlkit::cli::run(std::vector<std::string>(argv + 1, argv + argc));
  std::cout << r.out;
  std::cerr << r.err;
  return r.exit_code;
}
