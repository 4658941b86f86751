#define min(a, b) (((a) < (b)) ? (a) : (b))
#define max(a, b) (((a) > (b)) ? (a) : (b))
#define floord(n, d) (((n) < 0) ? -((-(n) + (d) - 1) / (d)) : (n) / (d))
#define no_overlap(b1, n1, b2, n2) ((b1) + (n1) <= (b2) || (b2) + (n2) <= (b1))
#include <stdlib.h>

void matmul(double C[2048][2048], double A[2048][2048], double B[2048][2048]) {
  double Packed_B[2048][256];
  double Packed_A[96][256];
  if (no_overlap(&C[0][0], 2048 * 2048, &A[0][0], 2048 * 2048) && no_overlap(&C[0][0], 2048 * 2048, &B[0][0], 2048 * 2048))
    for (int c0 = 0; c0 <= 0; c0 += 1)
      for (int c1 = 0; c1 <= 7; c1 += 1)
      {
        for (int c2 = 0; c2 <= min(2047 - 2048 * c0, 2047); c2 += 1)
          for (int c3 = 0; c3 <= min(2047 - 256 * c1, 255); c3 += 1)
            Packed_B[c2][c3] = B[256 * c1 + c3][2048 * c0 + c2];
        for (int c2 = 0; c2 <= 21; c2 += 1)
        {
          for (int c3 = 0; c3 <= min(2047 - 96 * c2, 95); c3 += 1)
            for (int c4 = 0; c4 <= min(2047 - 256 * c1, 255); c4 += 1)
              Packed_A[c3][c4] = A[96 * c2 + c3][256 * c1 + c4];
          for (int c3 = 0; c3 <= min(2047 - 2048 * c0, 2047); c3 += 1)
            for (int c4 = 0; c4 <= min(2047 - 96 * c2, 95); c4 += 1)
              for (int c5 = 0; c5 <= min(2047 - 256 * c1, 255); c5 += 1)
                C[96 * c2 + c4][2048 * c0 + c3] += Packed_A[c4][c5] * Packed_B[c3][c5];
        }
      }
  else
    for (int i = 0; i < 2048; i += 1)
      for (int j = 0; j < 2048; j += 1)
        for (int k = 0; k < 2048; k += 1)
          C[i][j] += A[i][k] * B[k][j];
}
