"""Phonocardiogram murmur / abnormal heart sound detection toolkit.

Subpackages:
    preprocess  recording ingestion, low-pass denoising, segmentation
    features    STFT / MFCC / wavelet-scattering feature maps
    nn          minimal from-scratch neural network engine
    metrics     confusion matrix, (weighted) accuracy, F1, AUROC, voting
    pipeline    manifests, splits, sampling, experiments, toy dataset
    annotator   segment-review HTTP service
"""

__version__ = "0.1.0"

from pcgkit.types import ClassLabel, Location, PcgRecording, Segment, Task

__all__ = ["ClassLabel", "Location", "PcgRecording", "Segment", "Task", "__version__"]
