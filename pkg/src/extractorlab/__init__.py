"""Two-source extractors over prime fields and their exact diagnostics."""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .field import (  # noqa: E402
    FieldElement,
    FieldVector,
    PrimeField,
    character,
    dot,
    make_field,
    minus_one_is_square,
    paraboloid_lift,
    paraboloid_points,
)
from .quantizer import coefficient_sum, rho_bit, rho_fourier, rho_sign, sigma  # noqa: E402
from .extractor import ExtractorSpec, extract, inner_form, make_extractor, value_histogram  # noqa: E402
from .sources import (  # noqa: E402
    Source,
    WeightedSet,
    adversarial_line_source,
    flat_source,
    general_source,
    level_sets,
    min_entropy_rate,
    uniform_source,
)
from .analysis import (  # noqa: E402
    additive_energy_brute,
    additive_energy_spectral,
    extractor_output_distribution,
    max_exponential_sum,
    parseval_check,
    statistical_distance,
)
from .bounds import RateParams, critical_set_size, rate_from_energy, scan_paraboloid_energies  # noqa: E402
