"""Fundamental tone of the free plate under tension.

Solves the plate eigenvalue problem on d-dimensional balls, evaluates the
trial-function quotient bound on arbitrary domains of prescribed volume, and
machine-checks the chain of inequalities behind the ball-maximizer result.
"""

__version__ = "0.1.0"

from .ball import BallMode, fundamental_tone
from .geom import Domain, QuadratureSpec, load_domain, quotient_bound
from .report import VerificationReport
from .trial import TrialProfile
from .verify import full_suite, spot_values
