#include "sessionscreen/cli.hpp"

int main(int argc, char** argv) { return sessionscreen::dispatch(argc, argv); }
