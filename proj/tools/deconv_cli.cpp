#include <deconv/cli.hpp>

int main(int argc, char** argv) { return deconv::cli_main(argc, argv); }
