"""Exact verification of coordinate and correspondence formulas for rank-2
parabolic logarithmic connections on the projective line.

The package is layered: ``rat``/``poly``/``ratfunc``/``linalg``/``forms``
provide exact arithmetic; ``connections`` the residue-matrix model and
elementary transformations; ``family`` the explicit connection family and
apparent-singularity maps; ``involution`` the coordinate form of the
self-correspondence; ``apparent`` the degree count of the induced covering;
``monodromy`` floating-point representation-variety checks; ``report`` and
``cli`` the verification driver.
"""

__version__ = "0.1.0"
