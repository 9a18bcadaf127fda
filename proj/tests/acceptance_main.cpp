#include <iostream>

#include "acceptance.hpp"

int main() {
  bool all = true;
  imopt::acceptance::run_all({}, [&](const imopt::acceptance::CriterionResult& r) {
    all = all && r.passed;
    std::cout << imopt::acceptance::format(r) << std::endl;
  });
  return all ? 0 : 1;
}
