"""
Marginal quadrature distribution, cat-state fringes and decoherence times.

Public API
----------
marginal_pdf, marginal_pdf_grid, cat_pdf, CatFringeReport, cat_fringe_report,
visibility_exponent, fringe_contrast, decoherence_time
"""

from distribution.marginal import (
    CatFringeReport,
    cat_fringe_report,
    cat_pdf,
    decoherence_time,
    fringe_contrast,
    marginal_pdf,
    marginal_pdf_complex,
    marginal_pdf_grid,
    visibility_exponent,
)

__all__ = [
    "CatFringeReport",
    "cat_fringe_report",
    "cat_pdf",
    "decoherence_time",
    "fringe_contrast",
    "marginal_pdf",
    "marginal_pdf_complex",
    "marginal_pdf_grid",
    "visibility_exponent",
]
