"""Channel-shuffle feature mixing for training small networks.

Array arguments are float64 (N, C) or (N, C, H, W); masks are lists of 0/1 per channel.
"""

import json

from ._core import (
    DimensionError,
    EvaluationError,
    FormatError,
    IoError,
    ParameterError,
    Rng,
    average_precision,
    hard_shufflemix,
    input_mixup,
    label_coefficients,
    make_circles,
    make_multilabel_synthetic,
    make_three_rings,
    manifold_mixup,
    mask_cardinality,
    mix_labels,
    nfm_perturb,
    pairing_permutation,
    sample_beta,
    sample_channel_mask,
    sample_layer_index,
    soft_shufflemix,
    threshold_labels,
)
from . import _core

__all__ = [
    "DimensionError",
    "EvaluationError",
    "FormatError",
    "IoError",
    "ParameterError",
    "Rng",
    "average_precision",
    "hard_shufflemix",
    "input_mixup",
    "label_coefficients",
    "make_circles",
    "make_multilabel_synthetic",
    "make_three_rings",
    "manifold_mixup",
    "mask_cardinality",
    "mix_labels",
    "nfm_perturb",
    "pairing_permutation",
    "resolve_manifest",
    "run_experiment",
    "sample_beta",
    "sample_channel_mask",
    "sample_layer_index",
    "soft_shufflemix",
    "threshold_labels",
]


def resolve_manifest(manifest):
    """The manifest with every dataset default filled in, as the run record echoes it."""
    return json.loads(_core._resolved_manifest_json(json.dumps(manifest)))


def run_experiment(manifest):
    """Trains and evaluates one experiment; writes outputs under manifest["out_dir"].

    `manifest` uses the JSON layout of a run record's "config" block; missing keys take
    their defaults. Returns (run_record, log_text).
    """
    record, log = _core._run_experiment_json(json.dumps(manifest))
    return json.loads(record), log
