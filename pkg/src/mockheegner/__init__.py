"""Mock Heegner points on x^3 + y^3 = p and x^3 + y^3 = p^2.

Submodules: cyclofield (arithmetic in Q(w)), qseries, etaeval, modcurve,
ellcurve, heegner (the construction), lseries and cli.
"""

__version__ = "0.1.0"
