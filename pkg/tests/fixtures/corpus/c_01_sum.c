#include <stdio.h>
#include <stdlib.h>

/* Reads n numbers and prints their sum. */
static long sum_array(const int *values, int count)
{
    long total = 0;
    for (int i = 0; i < count; i++) {
        total += values[i];
    }
    return total;
}

int main(void)
{
    int n;
    if (scanf("%d", &n) != 1) return 1;
    int *a = malloc(sizeof(int) * n);
    if (!a)
        return 2;
    for (int i = 0; i < n; i++)
        scanf("%d", &a[i]);
    printf("%ld\n", sum_array(a, n));  // result
    free(a);
    return 0;
}
