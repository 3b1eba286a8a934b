#include "haartrend/cli.hpp"

int main(int argc, char** argv) { return haartrend::dispatch(argc, argv); }
