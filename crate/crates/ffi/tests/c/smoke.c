#include <math.h>
#include <stdio.h>
#include "parking_ilu.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        PiluStatus st_ = (call);                                           \
        if (st_ != PILU_STATUS_OK) {                                       \
            fprintf(stderr, "%s -> %d: %s\n", #call, (int)st_,              \
                    pilu_last_error_message());                            \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    PiluModel *model = NULL;
    PiluOracle *oracle = NULL;
    PiluOracleResult r;
    CHECK(pilu_model_new(-2.0, 2.0, "constant(2.0)", &model));
    CHECK(pilu_oracle_new(model, &oracle));
    CHECK(pilu_oracle_result(oracle, &r));
    if (fabs(r.b_star + log(2.0) / 2.0) > 1e-8) {
        fprintf(stderr, "b_star %.17g\n", r.b_star);
        return 1;
    }
    PiluIlu *ilu = NULL;
    CHECK(pilu_ilu_new(-2.0, &ilu));
    PiluStep step;
    for (int i = 0; i < 20; i++) CHECK(pilu_ilu_step(ilu, model, 5, 0, &step));
    if (step.round != 19) return 1;
    if (pilu_model_evaluate(model, -5.0, &r.residual) != PILU_STATUS_DOMAIN) return 1;
    printf("b_star=%.17g records=%llu version=%s\n", r.b_star,
           (unsigned long long)step.records, pilu_version());
    pilu_ilu_free(ilu);
    pilu_oracle_free(oracle);
    pilu_model_free(model);
    return 0;
}
