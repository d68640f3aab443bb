#include "sched/harness.hpp"

int main(int argc, char** argv) { return sched::harness::main(argc, argv); }
