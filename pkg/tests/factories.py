"""
Random elements shared by the geometry and operator tests.
"""
import numpy as np

UNIT_TRIANGLE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


def random_vertical_wedge(rng: np.random.Generator) -> np.ndarray:
    """
    Vertices (6, 3) of a wedge whose top triangle sits straight above the bottom one.

    The footprint is a jittered, scaled and shifted unit triangle; bottom and
    top heights vary per vertex so neither face is horizontal.
    """
    scale = rng.uniform(0.5, 2.0)
    xy = scale * (UNIT_TRIANGLE + rng.uniform(-0.15, 0.15, (3, 2))) + rng.uniform(-1.0, 1.0, 2)
    bottom = rng.uniform(-0.3, 0.3, 3) * scale
    top = rng.uniform(0.7, 1.3, 3) * scale
    return np.vstack([
        np.column_stack([xy, bottom]),
        np.column_stack([xy, top]),
    ])
