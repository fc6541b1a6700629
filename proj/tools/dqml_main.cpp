#include "dqml/cli.hpp"

int main(int argc, char** argv) { return dqml::cli::run(argc, argv); }
