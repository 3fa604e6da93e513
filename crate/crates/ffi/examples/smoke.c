/* Build: cargo build -p basta-ffi --release
 *        cc crates/ffi/examples/smoke.c -Icrates/ffi/include \
 *           target/release/libbasta_ffi.a -lpthread -ldl -lm -o smoke */
#include <stdio.h>
#include "basta.h"

int main(void) {
    const char *cfg =
        "{\"rule\":\"LA-DF\",\"arrival\":{\"type\":\"bernoulli\",\"alpha\":0.3},"
        "\"service\":{\"type\":\"geometric\",\"beta\":0.5},\"slots\":1000000,\"seed\":42}";
    BastaModel *model = NULL;
    BastaReport *report = NULL;
    if (basta_model_from_json(cfg, &model) != BASTA_STATUS_OK) {
        fprintf(stderr, "config: %s\n", basta_last_error_message());
        return 1;
    }
    basta_simulate(model, &report);

    double tv = 0.0;
    bool passed = false;
    if (basta_check_basta(report, 0.01, &tv, &passed) != BASTA_STATUS_OK) {
        fprintf(stderr, "check: %s\n", basta_last_error_message());
        return 1;
    }
    double pre[4];
    size_t n = 0;
    BastaStatus s = basta_report_distribution(report, BASTA_DISTRIBUTION_PRE_ARRIVAL, pre, 4, &n);
    printf("TV(pre-arrival, potential-arrival) = %.4f (%s)\n", tv, passed ? "pass" : "fail");
    printf("distribution has %zu states; 4-slot buffer status %d\n", n, (int)s);

    basta_report_free(report);
    basta_model_free(model);
    return passed ? 0 : 1;
}
