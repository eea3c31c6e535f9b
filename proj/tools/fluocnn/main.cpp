#include <iostream>

#include "fluocnn/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fluocnn::app::run(args, std::cout, std::cerr);
}
