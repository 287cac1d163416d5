// Command entry points, callable in-process (the executable front-end is a
// thin argument parser around these).  All read JSON configuration files.
// Exit codes: 0 success, 2 configuration problem, 3 numerical failure.
#pragma once

#include <string>

namespace rod {

int cmd_simulate(const std::string& config_path);
int cmd_reduce(const std::string& config_path);
int cmd_poincare(const std::string& config_path);
int cmd_laxcheck(const std::string& config_path);
int cmd_verify(const std::string& suite);

}  // namespace rod
