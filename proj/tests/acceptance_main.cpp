#include <cstdlib>
#include <iostream>

#include "cramer/acceptance.hpp"

int main(int argc, char** argv) {
  cramer::AcceptanceOptions options;
  if (argc > 1) options.threads = static_cast<unsigned>(std::strtoul(argv[1], nullptr, 10));
  int failed = 0;
  for (const auto& r : cramer::run_acceptance(options)) {
    std::cout << cramer::format_result(r) << std::endl;
    if (!r.passed) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
