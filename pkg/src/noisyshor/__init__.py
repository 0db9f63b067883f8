"""noisyshor: period finding under noisy controlled rotations, at desk scale.

Core pieces: a noise-tape model for perturbed/banded transform circuits
(noise), closed-form probability evaluation (analytic), a gate-level
statevector oracle plus factoring pipeline (statevec), the integer backbone
(numtheory, periodic), and numerical verification of the supporting estimates
(lemma_lab, prime_surveys). Hot kernels run compiled when the extension is
built, pure numpy otherwise (kernels.get_backend()).
"""

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    ConfigurationError,
    FactorFound,
    SamplingExhaustedError,
)
from .noise import Distribution, Mode, NoiseConfig, NoiseTape, draw_tape, perturbed_angle
from .periodic import PeriodicFamily, ShorInstance, default_radius, make_instance, useful_set

__all__ = [
    "CapacityError",
    "ConfigurationError",
    "Distribution",
    "FactorFound",
    "Mode",
    "NoiseConfig",
    "NoiseTape",
    "PeriodicFamily",
    "SamplingExhaustedError",
    "ShorInstance",
    "default_radius",
    "draw_tape",
    "make_instance",
    "perturbed_angle",
    "useful_set",
    "__version__",
]
