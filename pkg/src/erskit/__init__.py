"""Exact-arithmetic toolkit for elliptic root systems.

Builds the ambient space and root data attached to an affine Cartan matrix,
generates window slices of the associated elliptic root systems, emits their
finite Lie superalgebra presentations, and machine-checks those presentations
inside two concrete realizations (a loop superalgebra and a quantum-torus
matrix algebra).
"""

__version__ = "0.1.0"
