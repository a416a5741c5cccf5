"""Face-parsing post-processing toolkit.

Label maps and masks are ``uint8`` arrays of shape ``(H, W)``, images are
``uint8`` arrays of shape ``(H, W, 3)`` and logits are ``float64`` arrays of
shape ``(C, H, W)``. Library errors raise :class:`EaparseError`, a
``ValueError`` whose ``code`` attribute names the error kind.
"""

from ._eaparse import *  # noqa: F401,F403
from ._eaparse import EaparseError

__all__ = [
    "EaparseError",
    "read_label_map",
    "write_label_map",
    "read_mask",
    "write_mask",
    "read_rgb_image",
    "write_rgb_image",
    "read_logits",
    "write_logits",
    "extract_boundary",
    "dilate",
    "erode",
    "edge_attention_mask",
    "softmax_cross_entropy",
    "edge_attention_loss",
    "boundary_bce",
    "hflip_with_swap",
    "rotate_quarter",
    "cut_half",
    "grabcut_refine",
    "softmax_map",
    "ensemble_argmax",
    "region_jaccard",
    "boundary_f",
    "default_boundary_tolerance",
    "evaluate_frames",
    "expand_box",
    "paste",
    "default_config",
    "run_clip",
]
