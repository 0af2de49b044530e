"""fansheaf: minimal complexes of graded modules on rational polyhedral fans.

The library builds the minimal complex attached to a fan, computes direct
images under fan subdivisions, decomposes them into shifted minimal
complexes, and certifies every step with exact rational arithmetic.
"""

from fansheaf.errors import CertificateError, InputError, WindowExhausted

__version__ = "0.1.0"

__all__ = ["CertificateError", "InputError", "WindowExhausted", "__version__"]
