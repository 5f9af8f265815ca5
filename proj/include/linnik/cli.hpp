#pragma once

namespace linnik::harness {

int run_cli(int argc, char** argv);

}  // namespace linnik::harness
