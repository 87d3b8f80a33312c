/* Minimal consumer of the C API: exercised by the c_smoke integration test.
 * Exits nonzero on the first failed check so the harness can report it. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "logcave.h"

#define CHECK(cond)                                                          \
    do {                                                                     \
        if (!(cond)) {                                                       \
            fprintf(stderr, "check failed at line %d: %s\nlast error: %s\n", \
                    __LINE__, #cond, lgc_last_error_message());              \
            return 1;                                                        \
        }                                                                    \
    } while (0)

int main(void) {
    lgc_body *ball = NULL;
    CHECK(lgc_body_ball(2, 1.0, &ball) == LGC_STATUS_OK);
    CHECK(lgc_body_dim(ball) == 2);

    double x[2] = {3.0, 4.0};
    CHECK(lgc_body_project(ball, x, 2) == LGC_STATUS_OK);
    CHECK(fabs(x[0] - 0.6) < 1e-12 && fabs(x[1] - 0.8) < 1e-12);

    int inside = 0;
    CHECK(lgc_body_membership(ball, x, 2, &inside) == LGC_STATUS_OK && inside == 1);

    /* error paths: bad construction, null out, message text */
    lgc_body *bad = NULL;
    CHECK(lgc_body_ball(0, 1.0, &bad) == LGC_STATUS_INVALID);
    CHECK(bad == NULL);
    CHECK(strlen(lgc_last_error_message()) > 0);
    CHECK(lgc_body_ball(2, 1.0, NULL) == LGC_STATUS_NULL_ARGUMENT);

    /* a short chain end to end */
    lgc_potential *pot = NULL;
    CHECK(lgc_potential_uniform(&pot) == LGC_STATUS_OK);
    lgc_trajectory *traj = NULL;
    CHECK(lgc_run_lmc(ball, pot, 0.01, 200, 7, &traj) == LGC_STATUS_OK);
    CHECK(lgc_trajectory_states(traj) == 201);
    CHECK(lgc_trajectory_dim(traj) == 2);
    double last[2];
    CHECK(lgc_trajectory_state(traj, 200, last, 2) == LGC_STATUS_OK);
    CHECK(sqrt(last[0] * last[0] + last[1] * last[1]) <= 1.0 + 1e-9);

    /* schedule calculator spot value */
    double eta = 0.0, steps = 0.0;
    CHECK(lgc_schedule_theorem(10, 2.0, 0.1, 1, 0.0, 0.0, &eta, &steps) == LGC_STATUS_OK);
    CHECK(fabs(eta / 5.1195637021595016e-18 - 1.0) < 1e-12);
    CHECK(fabs(steps / 1.799047908729241e18 - 1.0) < 1e-12);

    lgc_trajectory_free(traj);
    lgc_potential_free(pot);
    lgc_body_free(ball);
    lgc_body_free(NULL); /* explicit no-op */
    return 0;
}
