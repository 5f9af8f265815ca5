#include "linnik/cli.hpp"

int main(int argc, char** argv) {
  return linnik::harness::run_cli(argc, argv);
}
