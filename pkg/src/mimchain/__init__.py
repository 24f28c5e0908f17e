"""mimchain: serial-reproduction chains of pitch contours as iterated noisy maps.

Simulate mimicry chains under competing memory models (continuous,
discrete, gradually attracting) and the C-MOS inverter-string analogue,
then measure what the ensemble data can tell the models apart: bimodality
valley depth, the empirical one-iteration transfer map, contraction rate,
and the number of input distinctions that survive the channel.
"""

from .contour import (
    Contour,
    ContourEnsemble,
    DEFAULT_WINDOW,
    RawTrack,
    default_grid,
    hz_to_semitones,
    normalize,
    speaker_reference,
    window_indices,
)
from .response_maps import (
    AttractorSpec,
    CompressiveAttractor,
    FixedPoint,
    FixedPointScan,
    InverterTransfer,
    Quantizer,
    ResponseMap,
    Transpose,
    apply_contour,
    apply_scalar,
    default_attractors,
    fixed_points,
)
from .stimulus import BasisSet, WeightScheme, default_basis, gen_stimuli
from .chain import (
    ChainRun,
    VariationModel,
    run_chain,
    run_inverter_string,
    smooth_jitter,
    sweep_inverter,
)
from .analysis import (
    BinStat,
    DensityEstimate,
    FittedPull,
    HypothesisVerdict,
    TransferEstimate,
    VALLEY_DEPTH_DEFINITION,
    ValleyReport,
    contraction_rate,
    count_preserved_distinctions,
    density,
    diagnose,
    estimate_transfer,
    valley_depth,
    valley_trajectory,
    window_values,
)

__version__ = "0.1.0"

__all__ = [
    "AttractorSpec",
    "BasisSet",
    "BinStat",
    "ChainRun",
    "CompressiveAttractor",
    "Contour",
    "ContourEnsemble",
    "DEFAULT_WINDOW",
    "DensityEstimate",
    "FittedPull",
    "FixedPoint",
    "FixedPointScan",
    "HypothesisVerdict",
    "InverterTransfer",
    "Quantizer",
    "RawTrack",
    "ResponseMap",
    "TransferEstimate",
    "Transpose",
    "VALLEY_DEPTH_DEFINITION",
    "ValleyReport",
    "VariationModel",
    "WeightScheme",
    "apply_contour",
    "apply_scalar",
    "contraction_rate",
    "count_preserved_distinctions",
    "default_attractors",
    "default_basis",
    "default_grid",
    "density",
    "diagnose",
    "estimate_transfer",
    "fixed_points",
    "gen_stimuli",
    "hz_to_semitones",
    "normalize",
    "run_chain",
    "run_inverter_string",
    "smooth_jitter",
    "speaker_reference",
    "sweep_inverter",
    "valley_depth",
    "valley_trajectory",
    "window_values",
    "window_indices",
    "__version__",
]
