#include <iostream>
#include <string>

#include "sizeseq/run.hpp"

int main(int argc, char** argv) {
  std::string line;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) line += ' ';
    line += argv[i];
  }
  if (line.empty()) {
    std::cerr << "usage: sizeseq <command> <args> [--budget N] [--len N] "
                 "[--json]\n"
                 "commands: size | prefix | chi | compare | label | block | "
                 "verify\n";
    return 1;
  }
  try {
    sizeseq::RunResult r = sizeseq::run_line(line);
    if (line.find("--json") != std::string::npos)
      std::cout << r.json.dump(2) << '\n';
    else
      std::cout << r.text << '\n';
    return r.exit_code;
  } catch (const sizeseq::Error& e) {
    std::cerr << e.what() << '\n';  // errors self-describe their family
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 7;
  }
}
