"""Subspaces, chordal distance and the eigenvector centroid."""
import numpy as np

from grasscode.manifold import (
    chordal_distance_sq,
    grassmann_centroid,
    orthonormalize,
    principal_angles,
    random_point,
)

rng = np.random.default_rng(0)

# a 2-dimensional subspace of C^4, stored as an orthonormal 4x2 matrix
F = random_point(4, 2, rng)
print("F^H F =\n", np.round(F.data.conj().T @ F.data, 12))

# rotating the basis does not move the subspace
Q, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
print("d_c^2(F, FQ) =", chordal_distance_sq(F, F.data @ Q))

# two lines in C^2 at 45 degrees
e1 = np.array([[1.0], [0.0]])
d = orthonormalize([[1.0], [1.0]])
print("d_c^2(e1, diag) =", chordal_distance_sq(e1, d))  # 0.5
print("principal angle  =", np.degrees(principal_angles(e1, d)))  # 45

# the centroid of a cloud of subspaces: dominant eigenvectors of sum X X^H
cloud = [random_point(4, 2, rng) for _ in range(50)]
C = grassmann_centroid(cloud)
mean_d = np.mean([chordal_distance_sq(X, C) for X in cloud])
print(f"mean distortion to centroid {mean_d:.4f}")

# no random candidate does better
best_random = min(np.mean([chordal_distance_sq(X, P) for X in cloud]) for P in (random_point(4, 2, rng) for _ in range(500)))
print(f"best of 500 random candidates {best_random:.4f}")
