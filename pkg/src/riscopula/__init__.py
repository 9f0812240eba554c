"""Outage analysis of RIS-assisted Rayleigh links with quantized phase control."""

from .montecarlo import SystemConfig
from .outage import (
    Method,
    OutageResult,
    outage_asymptotic,
    outage_bbit,
    outage_closed_form_onebit,
    outage_quadrature_onebit,
    path_loss,
)

__version__ = "0.1.0"
