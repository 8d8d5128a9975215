from pcgkit.pipeline.experiment import (
    AblationRow,
    ExperimentConfig,
    ExperimentResult,
    ablate_window,
    load_split_features,
    prepare_manifest,
    run_experiment,
    vote_by_group,
)
from pcgkit.pipeline.manifest import (
    DatasetManifest,
    ManifestEntry,
    RelabelRuleError,
    apply_relabels,
    build_manifest,
    check_transition,
    load_relabel_file,
    split_patients,
)
from pcgkit.pipeline.sampling import (
    WeightedSampler,
    class_weights,
    downsample_majority,
    weighted_sampler,
)
from pcgkit.pipeline.toydata import generate_toy_dataset

__all__ = [
    "AblationRow",
    "ExperimentConfig",
    "ExperimentResult",
    "ablate_window",
    "load_split_features",
    "prepare_manifest",
    "run_experiment",
    "vote_by_group",
    "DatasetManifest",
    "ManifestEntry",
    "RelabelRuleError",
    "apply_relabels",
    "build_manifest",
    "check_transition",
    "load_relabel_file",
    "split_patients",
    "WeightedSampler",
    "class_weights",
    "downsample_majority",
    "weighted_sampler",
    "generate_toy_dataset",
]
