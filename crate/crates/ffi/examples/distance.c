/* Build: cc distance.c -I../include ../../../target/release/libdtwhar_ffi.a -lpthread -ldl -lm */
#include <stdio.h>
#include "dtwhar.h"

int main(int argc, char **argv) {
    const double a[] = {0, 1, 2, 1, 0, 1, 2, 1};
    const double b[] = {1, 2, 1, 0, 1, 2, 1, 0};
    DtwharSeries *sa = NULL, *sb = NULL;
    double plain, subseq;

    if (dtwhar_series_new(a, 8, 1, &sa) != DTWHAR_STATUS_OK ||
        dtwhar_series_new(b, 8, 1, &sb) != DTWHAR_STATUS_OK ||
        dtwhar_dtw_distance(sa, sb, 2, &plain) != DTWHAR_STATUS_OK ||
        dtwhar_dtwsubseq_distance(sa, sb, 4, 2, &subseq) != DTWHAR_STATUS_OK) {
        fprintf(stderr, "error: %s\n", dtwhar_last_error_message());
        return 1;
    }
    printf("dtw %.6f dtwsubseq %.6f\n", plain, subseq);

    if (argc > 1) {
        DtwharModel *model = NULL;
        uint32_t label;
        if (dtwhar_model_load(argv[1], &model) != DTWHAR_STATUS_OK) {
            fprintf(stderr, "error: %s\n", dtwhar_last_error_message());
            return 1;
        }
        printf("templates %zu\n", dtwhar_model_num_templates(model));
        if (dtwhar_model_predict(model, sa, &label) == DTWHAR_STATUS_OK)
            printf("label %u\n", label);
        else
            fprintf(stderr, "predict: %s\n", dtwhar_last_error_message());
        dtwhar_model_free(model);
    }
    dtwhar_series_free(sa);
    dtwhar_series_free(sb);
    return 0;
}
