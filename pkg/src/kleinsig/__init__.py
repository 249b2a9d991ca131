"""Signature invariants of knotted edge-3-colored trivalent graphs.

Exact-arithmetic toolkit: graph and diagram validation, unoriented link
signatures via checkerboard forms, surgery linking calculus, foam movie
verification, and the linear relation solver tying the invariants together.
"""

__version__ = "0.1.0"
