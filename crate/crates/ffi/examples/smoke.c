/* cc -Icrates/ffi/include crates/ffi/examples/smoke.c -Ltarget/debug -lholderlie_ffi */
#include <stdio.h>
#include "holderlie.h"

int main(void) {
    double lo[1] = {0.0}, hi[1] = {1.0}, coeffs[3] = {0.0, 0.0, 1.0};
    HlDomain *d = NULL;
    HlPolynomial *p = NULL;
    HlNormEstimate est;
    double c2 = 0.0;

    if (hl_domain_box(lo, hi, 1, &d) != HL_STATUS_OK) return 1;
    if (hl_polynomial_univariate(coeffs, 3, &p) != HL_STATUS_OK) return 1;
    if (hl_holder_norm(p, d, 1, 0.5, NULL, &est) != HL_STATUS_OK) return 1;
    hl_product_constant(d, 2, &c2);
    printf("holderlie %s: |t^2|_(1,1/2) >= %.6f, C_2 = %.6f\n", hl_version(), est.total, c2);

    if (hl_domain_ball(lo, 1, 0.9, &d) != HL_STATUS_OK) {
        char *msg = hl_last_error();
        printf("expected error: %s\n", msg);
        hl_string_free(msg);
    }
    hl_polynomial_free(p);
    hl_domain_free(d);
    return 0;
}
