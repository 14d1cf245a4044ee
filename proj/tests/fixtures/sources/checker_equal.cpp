// Usage: checker INPUT OUTPUT ANSWER. Accepts when the first integers of
// OUTPUT and ANSWER agree and reports the answer plus one as the score.
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  if (argc != 4) return 2;
  std::ifstream out(argv[2]), ans(argv[3]);
  long long got = 0, want = 0;
  if (!(out >> got)) {
    std::cout << "WA unreadable output\n";
    return 0;
  }
  ans >> want;
  if (got == want) {
    std::cout << "OK " << want + 1 << " match\n";
  } else {
    std::cout << "WA expected " << want << " got " << got << "\n";
  }
}
