#include "edof/cli.hpp"

int main(int argc, char** argv)
{
    return edof::cli::dispatch(argc, argv);
}
