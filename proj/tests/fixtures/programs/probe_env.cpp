// Prints what the process can see: argv[1] selects the probe.
//   read PATH     print the file's contents or "denied"
//   write PATH    try to create PATH, print "ok" or "denied"
//   env NAME      print getenv(NAME) or "(unset)"
//   net           try to open a TCP socket to 1.1.1.1:53, print "ok" or "denied"
//   uid           print the real uid
//   pids          print the number of entries in /proc that are pids
#include <arpa/inet.h>
#include <dirent.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>

int main(int argc, char** argv) {
  if (argc < 2) return 2;
  const char* what = argv[1];
  if (!std::strcmp(what, "read")) {
    FILE* f = std::fopen(argv[2], "rb");
    if (!f) {
      std::puts("denied");
      return 0;
    }
    int c;
    while ((c = std::fgetc(f)) != EOF) std::putchar(c);
    return 0;
  }
  if (!std::strcmp(what, "write")) {
    FILE* f = std::fopen(argv[2], "wb");
    std::puts(f && std::fputs("x", f) >= 0 && std::fclose(f) == 0 ? "ok" : "denied");
    return 0;
  }
  if (!std::strcmp(what, "env")) {
    const char* v = std::getenv(argv[2]);
    std::puts(v ? v : "(unset)");
    return 0;
  }
  if (!std::strcmp(what, "net")) {
    int s = socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(53);
    inet_pton(AF_INET, "1.1.1.1", &addr.sin_addr);
    std::puts(s >= 0 && connect(s, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0 ? "ok"
                                                                                          : "denied");
    return 0;
  }
  if (!std::strcmp(what, "uid")) {
    std::printf("%u\n", getuid());
    return 0;
  }
  if (!std::strcmp(what, "pids")) {
    int n = 0;
    if (DIR* d = opendir("/proc")) {
      while (dirent* e = readdir(d)) n += std::isdigit(static_cast<unsigned char>(e->d_name[0])) ? 1 : 0;
      closedir(d);
    }
    std::printf("%d\n", n);
    return 0;
  }
  return 2;
}
