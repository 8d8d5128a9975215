from pcgkit.annotator.render import render_feature_png, write_png
from pcgkit.annotator.service import AnnotatorService, serve
from pcgkit.annotator.state import (
    STATUS_CONFIRMED,
    STATUS_RELABELED,
    STATUS_UNREVIEWED,
    ReviewItem,
    ReviewState,
)

__all__ = [
    "render_feature_png",
    "write_png",
    "AnnotatorService",
    "serve",
    "STATUS_CONFIRMED",
    "STATUS_RELABELED",
    "STATUS_UNREVIEWED",
    "ReviewItem",
    "ReviewState",
]
