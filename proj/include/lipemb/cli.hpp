#pragma once

#include <string>
#include <vector>

namespace lipemb {

// Exit status: 0 ok, 1 config error, 2 precondition violation, 3 resource cap.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace lipemb
