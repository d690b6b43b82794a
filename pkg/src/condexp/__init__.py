"""Exact oracle-relative computation of distances to and conditional expectations onto subalgebras.

Subpackages: ``exactnum`` (exact scalars), ``termalg`` (rational points),
``oracle`` (query contracts), ``findim`` (exact matrix-algebra backend),
``engine`` (the algorithms) and ``cli``.
"""

__version__ = "0.1.0"
