#include "rsgame/cli.hpp"

int main(int argc, char** argv) { return rsgame::run(argc, argv); }
