from .buffers import (
    Coverage,
    FrameBuffers,
    pixel_coverage,
    read_depth,
    read_pgm16,
    read_ppm,
    write_depth,
    write_pgm16,
    write_ppm,
)
from .render import (
    BACKGROUND_RGB,
    FAMILY_GLOSS,
    HUMAN_GLOSS,
    active_backend,
    frame_category_ids,
    rasterize_frame,
    set_backend,
)

__all__ = [
    "BACKGROUND_RGB",
    "Coverage",
    "FAMILY_GLOSS",
    "FrameBuffers",
    "HUMAN_GLOSS",
    "active_backend",
    "frame_category_ids",
    "pixel_coverage",
    "rasterize_frame",
    "read_depth",
    "read_pgm16",
    "read_ppm",
    "set_backend",
    "write_depth",
    "write_pgm16",
    "write_ppm",
]
