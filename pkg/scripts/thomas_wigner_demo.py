"""Thomas-Wigner rotation from two perpendicular boosts, and what it does to a spin-1/2 packet."""
import numpy as np

from relamp import kinematics as kin
from relamp import poincare as pc
from relamp.amplitudes import ParticleSpec, gaussian, scalar_product


def thomas_angle(b1, b2):
    g1, g2 = kin.gamma(b1), kin.gamma(b2)
    g = g1 * g2
    return np.arccos((1 + g + g1 + g2) ** 2 / ((1 + g) * (1 + g1) * (1 + g2)) - 1)


print(f"{'beta':>6} {'angle (matrices)':>17} {'closed form':>12}")
for b in (0.1, 0.3, 0.5, 0.7, 0.9, 0.99):
    _, R = kin.decompose(kin.pure_boost([0, b, 0]) @ kin.pure_boost([b, 0, 0]))
    angle = np.arctan2(np.linalg.norm([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]]) / 2,
                       (np.trace(R) - 1) / 2)
    print(f"{b:6.2f} {angle:17.12f} {thomas_angle(b, b):12.12f}")

# a packet with spin along x, boosted along x then y, versus the single boost;
# the Wigner rotation is about z, so the spin direction visibly turns
par = ParticleSpec(1.0, 1)
psi = gaussian(par, [0, 0, 0], 0.2, spin_weights=[1, 1])
b1, b2 = np.array([0.6, 0, 0]), np.array([0, 0.6, 0])
two = pc.boost(pc.boost(psi, b1), b2)
beta12, R = pc.boost_composition(b1, b2)
one = pc.boost(psi, beta12)
rotated = pc.boost(pc.rotate(psi, R), beta12)
print("|<single boost | two boosts>|^2      =", abs(scalar_product(one, two)) ** 2)
print("|<boost after Wigner rotation | two>|^2 =", abs(scalar_product(rotated, two)) ** 2)
