/* Build: cc segment.c -I../include -L../../../target/release -lmorphtrie_ffi -o segment */
#include <stdio.h>

#include "morphtrie.h"

int main(int argc, char **argv) {
    if (argc < 3) {
        fprintf(stderr, "usage: %s MODEL_DIR WORD...\n", argv[0]);
        return 2;
    }
    MtSegmenter *seg = NULL;
    MtStatus st = mt_segmenter_load(argv[1], MT_STRATEGY_ALL_SPLITS, 5, &seg);
    if (st != MT_STATUS_OK) {
        fprintf(stderr, "load failed (%d): %s\n", (int)st, mt_last_error_message());
        return 1;
    }
    for (int i = 2; i < argc; i++) {
        char *text = NULL;
        double score = 0.0;
        st = mt_segmenter_segment(seg, argv[i], &text, &score);
        if (st != MT_STATUS_OK) {
            fprintf(stderr, "%s: %s\n", argv[i], mt_last_error_message());
            continue;
        }
        printf("%s\t%s\t%.4f\n", argv[i], text, score);
        mt_string_free(text);
    }
    mt_segmenter_free(seg);
    return 0;
}
