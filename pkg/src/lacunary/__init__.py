"""Computable lacunary-sequence experiments: sequence classes, Diophantine
certificates, exact variances of permuted dilated sums, and sampling checks
of the CLT, LIL and discrepancy behaviour."""

__version__ = "0.1.0"
FORMAT_VERSION = 1

from .errors import (CapabilityError, CapacityError, LacunaryError,  # noqa: E402
                     ValidationError, VersionMismatchError)
