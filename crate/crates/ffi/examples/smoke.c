#include <stdio.h>
#include "nmcodex.h"
int main(void) {
  NmcProfile *p = NULL;
  if (nmc_profile_load("XS", &p) != NMC_STATUS_OK) return 1;
  NmcCodec *c = NULL;
  if (nmc_codec_new(p, NMC_SCHEME_THREE_SPLIT, &c) != NMC_STATUS_OK) return 2;
  uint64_t parts[3]; uint64_t m = 0; uint8_t ok = 0;
  if (nmc_codec_encode(c, 2, 777, parts, 3) != NMC_STATUS_OK) return 3;
  if (nmc_codec_decode(c, parts, 3, &m, &ok) != NMC_STATUS_OK || !ok || m != 2) return 4;
  if (nmc_profile_load("nope", &p) != NMC_STATUS_UNKNOWN_PROFILE) return 5;
  printf("ok: %s\n", nmc_last_error());
  nmc_codec_free(c);
  return 0;
}
