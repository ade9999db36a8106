"""Numerical laboratory for the damped Korteweg-de Vries equation on a half-line.

Solves u_t + u_x + u_xxx + u u_x + a(x) u = 0 on [0, L] with u(0) = 0,
u(L) = u_x(L) = 0, and measures energy identities and decay rates.
"""

__version__ = "0.1.0"
