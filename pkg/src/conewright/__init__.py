"""conewright: numerical tangent/paratangent cones, Grassmannian distances,
Hausdorff densities, and C1-manifold classification for subsets of R^n."""

from .cones import (
    ConeConfig,
    ConeEstimate,
    cones_coincide,
    estimate_paratangent_cone,
    estimate_tangent_cone,
)
from .classifier import (
    BundleReport,
    ProbeGrid,
    Verdict,
    Witness,
    build_probe_grid,
    bundle_report,
    check_openness,
    check_projection_injectivity,
    classify,
    classify_density,
    classify_projection,
    classify_two_cones,
)
from .corpus import CorpusEntry, GroundTruth, corpus, corpus_entry
from .density import DensityEstimate, estimate_density, estimate_measure, unit_ball_volume
from .errors import ContractViolation, ResourceLimit, UnconvergedEstimate
from .grassmann import (
    Subspace,
    direction_set_distance,
    fit_subspace,
    grassmann_delta,
    hausdorff_direction_distance,
    is_orthogonal,
    project,
)
from .setmodel import Chart, SetOracle, rotated_oracle, sample_in_ball, scaled_oracle

__version__ = "0.1.0"
