"""heckelab: exact Hecke algebras of level-1 modular forms.

Integer q-expansions, Hecke operators on the Miller basis, Manin-symbol
modular symbols, order normalisation/index valuations, and Newton-polygon
congruence verdicts -- all in exact arithmetic.
"""

__version__ = "0.1.0"
