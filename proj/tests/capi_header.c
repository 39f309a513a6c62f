/* The public header must compile as plain C. */
#include "cevfb/cevfb.h"

#include <stdio.h>

int main(void) {
    cevfb_model m;
    cevfb_scheme_config s;
    cevfb_result r;
    cevfb_status st;

    cevfb_model_defaults(&m);
    m.strike = 10.0;
    m.maturity = 0.5;
    m.sigma = 0.2;
    m.rate = 0.05;
    m.alpha = -1.0 / 3.0;
    m.spot = 10.0;
    cevfb_scheme_defaults(&s, CEVFB_SCHEME_DCSL);
    st = cevfb_price(&m, &s, NULL, &r);
    if (st != CEVFB_OK) {
        fprintf(stderr, "%s: %s\n", cevfb_status_string(st), cevfb_last_error());
        return 1;
    }
    printf("%.6f\n", r.value);
    return r.value > 0.46 && r.value < 0.47 ? 0 : 1;
}
