/* Reads an SCM file given on the command line and prints mass, boundary mass and
 * the first two eigenvalues. Exit status is the failing status code, if any. */
#include <stdio.h>

#include "currentlab.h"

static int fail(CurrentlabStatus s) {
    const char *msg = currentlab_last_error_message();
    fprintf(stderr, "error %d: %s\n", (int)s, msg ? msg : "");
    return (int)s;
}

int main(int argc, char **argv) {
    if (argc != 2) {
        fprintf(stderr, "usage: %s file.scm\n", argv[0]);
        return 64;
    }
    CurrentlabCurrent *t = NULL, *b = NULL;
    CurrentlabStatus s = currentlab_current_read_scm(argv[1], &t);
    if (s != CURRENTLAB_STATUS_OK) return fail(s);

    double mass = 0.0, bmass = 0.0, lambda[2];
    s = currentlab_current_mass(t, &mass);
    if (s == CURRENTLAB_STATUS_OK) s = currentlab_current_boundary(t, &b);
    if (s == CURRENTLAB_STATUS_OK) s = currentlab_current_mass(b, &bmass);
    if (s == CURRENTLAB_STATUS_OK) s = currentlab_spectrum(t, 2, 1, lambda, 2);
    if (s != CURRENTLAB_STATUS_OK) {
        currentlab_current_free(b);
        currentlab_current_free(t);
        return fail(s);
    }
    printf("mass %.6f\nboundary %.6f\nlambda %.6f %.6f\n", mass, bmass, lambda[0], lambda[1]);
    currentlab_current_free(b);
    currentlab_current_free(t);
    return 0;
}
