#include "lipemb/cli.hpp"

int main(int argc, char** argv) { return lipemb::run(argc, argv); }
