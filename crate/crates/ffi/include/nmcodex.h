#ifndef NMCODEX_H
#define NMCODEX_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum NmcStatus {
  NMC_STATUS_OK = 0,
  NMC_STATUS_NULL_POINTER = 1,
  NMC_STATUS_UNKNOWN_PROFILE = 2,
  NMC_STATUS_MALFORMED_INPUT = 3,
  NMC_STATUS_INCOMPATIBLE = 4,
  NMC_STATUS_INVALID_ARGUMENT = 5,
  NMC_STATUS_INTERNAL = 6,
} NmcStatus;

/**
 * Classical codes reachable through [`nmc_codec_new`].
 */
typedef enum NmcScheme {
  NMC_SCHEME_THREE_SPLIT = 0,
  NMC_SCHEME_TWO_SPLIT = 1,
} NmcScheme;

/**
 * A classical split-state code.
 */
typedef struct NmcCodec NmcCodec;

/**
 * A registered profile bound to its extractor.
 */
typedef struct NmcProfile NmcProfile;

/**
 * Sizes of a registered profile, in bits.
 */
typedef struct NmcProfileInfo {
  uint32_t n;
  uint32_t y_len;
  uint32_t out_len;
  uint32_t randomness_len;
} NmcProfileInfo;

/**
 * Output of the randomness encoder.
 */
typedef struct NmcNmreOutput {
  uint64_t message;
  uint64_t x;
  uint64_t y;
} NmcNmreOutput;

/**
 * Sizes of a codec, in bits. Unused entries of `split_lens` are zero.
 */
typedef struct NmcCodecInfo {
  uint32_t message_len;
  uint32_t randomness_len;
  uint32_t splits;
  uint32_t split_lens[3];
} NmcCodecInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Text of the last error on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *nmc_last_error(void);

/**
 * Loads a profile by name from the built-in registry, or from
 * `$NMCODEX_PROFILE_DIR` when set.
 *
 * # Safety
 * `name` must be a valid NUL-terminated string and `out` writable.
 */
enum NmcStatus nmc_profile_load(const char *name, struct NmcProfile **out_profile);

/**
 * # Safety
 * `profile` must come from [`nmc_profile_load`] and not be used afterwards.
 */
void nmc_profile_free(struct NmcProfile *profile);

/**
 * # Safety
 * Pointers must be valid.
 */
enum NmcStatus nmc_profile_info(const struct NmcProfile *profile, struct NmcProfileInfo *info);

/**
 * Extractor output on sources `x` (`n` bits) and `y` (`y_len` bits).
 *
 * # Safety
 * Pointers must be valid.
 */
enum NmcStatus nmc_nmext_eval(const struct NmcProfile *profile,
                              uint64_t x,
                              uint64_t y,
                              uint64_t *result);

/**
 * Splits `randomness` (`n + y_len` bits) into the two sources and the
 * message they decode to.
 *
 * # Safety
 * Pointers must be valid.
 */
enum NmcStatus nmc_nmre_encode(const struct NmcProfile *profile,
                               uint64_t randomness,
                               struct NmcNmreOutput *result);

/**
 * # Safety
 * Pointers must be valid.
 */
enum NmcStatus nmc_nmre_decode(const struct NmcProfile *profile,
                               uint64_t x,
                               uint64_t y,
                               uint64_t *message);

/**
 * Builds a classical code over the profile.
 *
 * # Safety
 * `profile` must be valid and `out_codec` writable.
 */
enum NmcStatus nmc_codec_new(const struct NmcProfile *profile,
                             enum NmcScheme scheme,
                             struct NmcCodec **out_codec);

/**
 * # Safety
 * `codec` must come from [`nmc_codec_new`] and not be used afterwards.
 */
void nmc_codec_free(struct NmcCodec *codec);

/**
 * # Safety
 * Pointers must be valid.
 */
enum NmcStatus nmc_codec_info(const struct NmcCodec *codec, struct NmcCodecInfo *info);

/**
 * Encodes `message` with `randomness`, writing one integer per split into
 * `parts`, which must hold `parts_len >= splits` entries.
 *
 * # Safety
 * `parts` must point to `parts_len` writable integers.
 */
enum NmcStatus nmc_codec_encode(const struct NmcCodec *codec,
                                uint64_t message,
                                uint64_t randomness,
                                uint64_t *parts,
                                size_t parts_len);

/**
 * Decodes `parts`. `accepted` is set to 0 when the decoder outputs the
 * rejection symbol, in which case `message` is left untouched.
 *
 * # Safety
 * `parts` must point to `parts_len` readable integers; outputs writable.
 */
enum NmcStatus nmc_codec_decode(const struct NmcCodec *codec,
                                const uint64_t *parts,
                                size_t parts_len,
                                uint64_t *message,
                                uint8_t *accepted);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NMCODEX_H */
