#!/usr/bin/env python3
"""Kernel evaluation and the geometry it induces.

Every learner in the library sees examples only through kernel values, so
this demo walks the two kernel families and the feature-space distance that
drives the proxy-update rule.
"""

import numpy as np

from okselect import feature_distance, gaussian, kernel_eval, polynomial
from okselect.kernels import kernel_column

rng = np.random.default_rng(0)

print("=== Gaussian kernels ===")
x = np.array([1.0, 0.0])
z = np.array([0.0, 0.0])
for sigma in (0.25, 1.0, 4.0):
    spec = gaussian(sigma)
    print(f"sigma={sigma:<5} k(x,x)={kernel_eval(spec, x, x):.3f}  "
          f"k(x,z)={kernel_eval(spec, x, z):.6f}  "
          f"||phi(x)-phi(z)||={feature_distance(spec, x, z):.6f}")

print()
print("The diagonal is always 1 for Gaussian kernels, and the feature")
print("distance saturates at sqrt(2) as points move apart:")
far = feature_distance(gaussian(1.0), np.array([50.0, 0.0]), np.array([-50.0, 0.0]))
print(f"  distance at separation 100: {far:.12f}  (sqrt(2) = {np.sqrt(2):.12f})")

print()
print("=== Polynomial kernels (used by the adversarial stream) ===")
e1, e2 = np.eye(2)
spec = polynomial(2)
print(f"orthonormal basis vectors: k(e1,e2)={kernel_eval(spec, e1, e2)}  "
      f"k(e1,e1)={kernel_eval(spec, e1, e1)}")

print()
print("=== Batched evaluation ===")
print("Stored examples live in a matrix; one query against all of them is a")
print("single matrix-vector product plus cached row norms:")
X = rng.normal(size=(5, 3))
sq = np.einsum("ij,ij->i", X, X)
q = rng.normal(size=3)
col = kernel_column(gaussian(1.0), X, sq, q)
check = [kernel_eval(gaussian(1.0), row, q) for row in X]
print("  batch:", np.round(col, 6))
print("  loop :", np.round(check, 6))
print("  max abs difference:", float(np.max(np.abs(col - np.array(check)))))
