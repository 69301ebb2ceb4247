"""diracinv: invert the coupled first-order spinor system.

Given a closed-form spinor field the toolkit classifies it as degenerate or
non-degenerate, recovers the electromagnetic 4-potential(s) and the unique
mass, generates the infinite potential family in the degenerate case, and
verifies every claim against the forward residual.
"""

__version__ = "0.1.0"

from . import catalog, clifford, degeneracy, exprlang, fields, inversion, verify  # noqa: F401
from .errors import DiracinvError  # noqa: F401
