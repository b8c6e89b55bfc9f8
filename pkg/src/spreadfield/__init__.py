"""Mean-field moving-boundary simulation of limit-order-book spread regions.

Calibrates the model from order-book quotes (`lob`), integrates the
deterministic and stochastic mean-field ball dynamics (`dynamics`,
`integrator`), runs seeded Monte Carlo ensembles (`montecarlo`), verifies
the spherical Ito-calculus identities (`ito_geometry`), and provides the
liquidation bookkeeping (`portfolio`).  The `spreadfield` CLI exposes all
of it as batch subcommands.
"""

from .kernels import BACKEND_NAME, COMPILED

__version__ = "0.1.0"

__all__ = ["BACKEND_NAME", "COMPILED", "__version__"]
