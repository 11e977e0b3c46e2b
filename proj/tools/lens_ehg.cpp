#include "cli_impl.hpp"

int main(int argc, char** argv) {
    return lensehg::cli::run_main(argc, argv);
}
