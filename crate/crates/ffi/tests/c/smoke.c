#include <stdio.h>
#include <string.h>
#include "nilmix.h"

#define CHECK(x) do { if (!(x)) { fprintf(stderr, "failed: %s\n", #x); return 1; } } while (0)

int main(void) {
    NilmixGroup *g = NULL;
    CHECK(nilmix_group_new(NILMIX_FAMILY_HEISENBERG, 3, 1, 0, &g) == NILMIX_STATUS_OK);
    CHECK(nilmix_group_order(g) == 27);
    size_t series[8], n = 0;
    CHECK(nilmix_group_series(g, series, 8, &n) == NILMIX_STATUS_OK);
    CHECK(n == 3 && series[0] == 27 && series[1] == 3 && series[2] == 1);

    NilmixWalk *w = NULL;
    CHECK(nilmix_walk_new_random(g, 3, 7, &w) == NILMIX_STATUS_OK);
    double d0 = 0, d1 = 0, tmix = 0;
    CHECK(nilmix_walk_tv(w, 0.0, &d0) == NILMIX_STATUS_OK);
    CHECK(nilmix_walk_tv(w, 50.0, &d1) == NILMIX_STATUS_OK);
    CHECK(d0 > 0.96 && d1 < 0.05);
    CHECK(nilmix_walk_mixing_time(w, 0.25, &tmix) == NILMIX_STATUS_OK && tmix > 0);

    NilmixGroup *bad = NULL;
    CHECK(nilmix_group_new(NILMIX_FAMILY_HEISENBERG, 1, 1, 0, &bad) == NILMIX_STATUS_INVALID_ARGUMENT);
    char msg[256];
    CHECK(nilmix_last_error(msg, sizeof msg) > 1 && strlen(msg) > 0);

    nilmix_walk_free(w);
    nilmix_group_free(g);
    printf("ok %s\n", nilmix_version());
    return 0;
}
