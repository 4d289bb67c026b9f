"""Seeded random Cantor-series measures with verifiable Fourier decay.

The package builds translation-randomized Cantor-type measures on the
circle, certifies at finite depth that their supports carry no three-term
arithmetic progressions, and measures the Fourier-decay and mass-regularity
behavior that makes the limiting supports Salem-like.
"""

from .ap_verifier import (
    ApCertificate,
    NodeCertificates,
    ap_report,
    cross_cell_scan,
    node_certificates,
    realize_cross_cell_triple,
)
from .cantor_tree import (
    MeasureTree,
    Schedule,
    StepMeasure,
    TreeLoadError,
    build_tree,
    cell_mass,
    custom_schedule,
    derive_run_seed,
    derive_translation,
    interval_of,
    level_intervals,
    load_tree,
    save_tree,
    schedule_a,
    schedule_b,
    tree_from_dict,
    tree_to_dict,
)
from .discrete_ap import (
    ApWitness,
    OracleVerdict,
    ResidueSet,
    UniformityReport,
    behrend_sphere,
    dft_uniformity,
    double_embed,
    find_3ap_mod,
    is_ap_free,
    max_property_ii,
    property_ii_oracle,
    spanning_ap_bruteforce,
    uniformity_demo,
)
from .fourier import (
    DEFAULT_K_CAP,
    DecayProfile,
    FourierCoeffs,
    IncrementBound,
    IncrementReport,
    decay_profile,
    hoeffding_bound,
    increment_bound,
    increment_scan,
    interval_ft,
    modulation_check,
    mu_hat,
    mu_hat_batch,
    tail_envelope,
    worker_count,
    write_coeffs_csv,
)
from .regularity import (
    LevelMassCheck,
    MassBandReport,
    RegularityReport,
    ball_mass,
    dyadic_radii,
    frostman_scan,
    variant_b_mass_check,
)
from .svgplot import emit_svg

__version__ = "0.1.0"

__all__ = [
    "ApCertificate",
    "ApWitness",
    "DecayProfile",
    "DEFAULT_K_CAP",
    "FourierCoeffs",
    "IncrementBound",
    "IncrementReport",
    "LevelMassCheck",
    "MassBandReport",
    "MeasureTree",
    "NodeCertificates",
    "OracleVerdict",
    "RegularityReport",
    "ResidueSet",
    "Schedule",
    "StepMeasure",
    "TreeLoadError",
    "UniformityReport",
    "ap_report",
    "ball_mass",
    "behrend_sphere",
    "build_tree",
    "cell_mass",
    "cross_cell_scan",
    "custom_schedule",
    "decay_profile",
    "derive_run_seed",
    "derive_translation",
    "dft_uniformity",
    "double_embed",
    "dyadic_radii",
    "emit_svg",
    "find_3ap_mod",
    "frostman_scan",
    "hoeffding_bound",
    "increment_bound",
    "increment_scan",
    "interval_ft",
    "interval_of",
    "is_ap_free",
    "level_intervals",
    "load_tree",
    "max_property_ii",
    "modulation_check",
    "mu_hat",
    "mu_hat_batch",
    "node_certificates",
    "property_ii_oracle",
    "realize_cross_cell_triple",
    "save_tree",
    "schedule_a",
    "schedule_b",
    "spanning_ap_bruteforce",
    "tail_envelope",
    "tree_from_dict",
    "tree_to_dict",
    "uniformity_demo",
    "variant_b_mass_check",
    "worker_count",
    "write_coeffs_csv",
]
