"""
Distances and updates on the Poincare ball
==========================================

Points live inside the unit ball. Distances grow without bound near the
boundary, which is what gives tree-like data room to spread out.
"""

import numpy as np

from tagembed.geometry import distance_gradient, hyperbolic_distance, project, rsgd_update

# The origin and a point halfway to the boundary are ln 3 apart.
print("d(0, 0.5)       =", hyperbolic_distance([0, 0], [0.5, 0]), " ln 3 =", np.log(3))

# The same Euclidean step costs more and more as we approach the boundary.
for r in (0.0, 0.5, 0.9, 0.99):
    print(f"d({r}, {r + 0.005:.3f}) = {hyperbolic_distance([r, 0], [r + 0.005, 0]):.4f}")

# Two points near the rim on opposite sides are far apart, even though
# the Euclidean gap is only 1.8.
print("d(0.9, -0.9)    =", hyperbolic_distance([0.9, 0], [-0.9, 0]))

# The gradient of the distance wrt u points away from v and is scaled by
# the conformal factor: large near the rim, 2 at the origin.
gu, _ = distance_gradient(np.array([0.0, 0.0]), np.array([0.3, 0.0]))
print("grad at origin  =", gu)

# A Riemannian step rescales the Euclidean gradient by (1 - |x|^2)^2 / 4,
# so points near the rim move slowly in Euclidean terms.
x = np.array([0.95, 0.0])
print("rsgd step       =", rsgd_update(x, np.array([-1.0, 0.0]), lr=0.1) - x)

# Any step that would leave the ball is pulled back just inside it.
y = project(np.array([3.0, 4.0]))
print("projected norm  =", np.linalg.norm(y))
