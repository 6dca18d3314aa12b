#include "rewriteval/cli.hpp"

int main(int argc, char** argv) {
    return rewriteval::run_cli(argc, argv);
}
