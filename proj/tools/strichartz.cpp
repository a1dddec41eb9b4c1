#include "strichartz/runner.hpp"

int main(int argc, char** argv) { return strichartz::runner::run(argc, argv); }
