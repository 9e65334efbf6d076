"""Farey fractions with denominators restricted by a modulus d.

Subpackages follow the computation: `farey` (sequences and gap histograms),
`index` (ell-indices and the continuant identity), `dynamics` (Farey map and
exact polygons), `lattice` (visible lattice point counts), `constant`
(the constant c(d, k) and its empirical checks), `cli`.
"""

__version__ = "0.1.0"
