"""Throughput, layered expected rate and ergodic capacity of Rayleigh block-fading links."""

from .channel import McConfig, McEstimate
from .rates_miso import (LayerPlan, miso_cl_expected_rate, miso_ergodic, miso_expected_rate_k,
                         miso_throughput_max)

__version__ = "0.1.0"

__all__ = ["McConfig", "McEstimate", "LayerPlan", "miso_throughput_max",
           "miso_expected_rate_k", "miso_cl_expected_rate", "miso_ergodic"]
