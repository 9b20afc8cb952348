"""Label construction, encoding, editing and persistence."""
from .compose import compose, decode_onehot, encode_onehot, make_structure_mask
from .edits import ALL_KINDS, LABEL_KINDS, SKETCH_KINDS, EditOp, apply_edit
from .io import (
    decode_png,
    encode_png,
    image_to_uint8,
    load_composite,
    load_image,
    load_label,
    load_sketch,
    save_composite,
    save_image,
    save_label,
    save_sketch,
    uint8_to_image,
)
from .sketch import default_thresholds, extract_sketch, gradient_magnitude
from .types import (
    CompositeLabel,
    EdgeSketch,
    LabelMap,
    StructureMask,
    validate_image,
)

__all__ = [
    "ALL_KINDS",
    "LABEL_KINDS",
    "SKETCH_KINDS",
    "CompositeLabel",
    "EdgeSketch",
    "EditOp",
    "LabelMap",
    "StructureMask",
    "apply_edit",
    "compose",
    "decode_onehot",
    "decode_png",
    "default_thresholds",
    "encode_onehot",
    "encode_png",
    "extract_sketch",
    "gradient_magnitude",
    "image_to_uint8",
    "load_composite",
    "load_image",
    "load_label",
    "load_sketch",
    "make_structure_mask",
    "save_composite",
    "save_image",
    "save_label",
    "save_sketch",
    "uint8_to_image",
    "validate_image",
]
