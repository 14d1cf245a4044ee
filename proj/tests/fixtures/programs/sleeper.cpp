// Sleeps argv[1] milliseconds without using CPU.
#include <unistd.h>
#include <cstdlib>

int main(int argc, char** argv) {
  usleep(static_cast<useconds_t>(std::atol(argc > 1 ? argv[1] : "100000") * 1000));
}
