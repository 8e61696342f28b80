#include <stdio.h>

#include "arxtrail/arxtrail.h"

int main(void) {
  arxt_context* ctx = NULL;
  int valid = 0;
  unsigned w = 0;
  if (arxt_context_new(NULL, &ctx) != ARXT_OK) return 1;
  if (arxt_xdp(ctx, 6, "0b010000", "0b010000", "0b000000", &valid, &w) != ARXT_OK) return 1;
  printf("valid=%d weight=%u\n", valid, w);
  arxt_context_free(ctx);
  return valid == 1 && w == 1 ? 0 : 1;
}
