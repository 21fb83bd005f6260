#include <iostream>

#include "tracemin/cli.hpp"

int
main(int argc, char** argv)
{
  return tracemin::run_cli(argc, argv, std::cout, std::cerr);
}
