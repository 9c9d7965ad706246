#pragma once

namespace qgnls::cli {

int run(int argc, char** argv);

}  // namespace qgnls::cli
