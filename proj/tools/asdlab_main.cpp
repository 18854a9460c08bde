#include <cstdio>

int main() {
  std::puts("asdlab cli placeholder");
  return 0;
}
