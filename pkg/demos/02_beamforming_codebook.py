"""Product beamforming codebook for a 4x4 planar array and a single-antenna receiver.

The 16-element channel h is reshaped into a 4x4 matrix H~ whose dominant
singular pair (u1, v1) gives the product beamformer u1^* kron v1. The
vertical and horizontal factors are clustered separately, so feedback is
Bv + Bh bits instead of one index into a 16-dimensional codebook.
"""
import numpy as np

from grasscode.beamforming import bf_evaluate, bf_train, reshape_miso
from grasscode.datagen import gen_ray_channel, split

data = gen_ray_channel(3000, mr=1, mv=4, mh=4, n_paths=2, angle_spread_deg=5, seed=1)
train, test = split(data, 0.8, seed=0)

h = test[0].H
R = reshape_miso(h, 4, 4)
print("singular values of H~:", np.round(np.linalg.svd(R.Htilde, compute_uv=False), 3))
print("share of energy in the product beamformer:", round(R.sigma1**2 / np.linalg.norm(h) ** 2, 3))

print("\n Bv Bh  Gamma_av  vs MISO optimum")
for bv, bh in [(1, 1), (2, 2), (3, 3), (4, 4), (5, 5)]:
    C = bf_train(train.samples, bv, bh, seed=0)
    res = bf_evaluate(test.samples, C)
    print(f"{bv:3d}{bh:3d}  {res.gamma_av:8.4f}  {res.gamma_av_vs_full:8.4f}")
