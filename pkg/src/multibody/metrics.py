"""Pose-error metrics: ADD, ADD-S, and the clamped area-under-curve score."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .se3 import Pose


@dataclass
class Mesh:
    vertices: np.ndarray

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        if self.vertices.shape[0] < 1:
            raise ValueError("mesh must contain at least one vertex")

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]


def load_obj(path) -> Mesh:
    """Vertices from the "v x y z" lines of an ASCII OBJ file; everything
    else (faces, normals, textures) is ignored."""
    vertices = []
    with open(path) as f:
        for line in f:
            parts = line.split()
            if len(parts) >= 4 and parts[0] == "v":
                vertices.append([float(x) for x in parts[1:4]])
    if not vertices:
        raise ValueError(f"no vertices found in {path}")
    return Mesh(np.array(vertices))


def add_error(mesh: Mesh, rel: Pose) -> float:
    """Mean distance between mesh vertices and their images under the
    relative transform between estimated and ground-truth pose."""
    moved = rel.apply(mesh.vertices)
    return float(np.mean(np.linalg.norm(moved - mesh.vertices, axis=1)))


def add_s_error(mesh: Mesh, rel: Pose) -> float:
    """Symmetric variant: mean over vertices of the distance to the closest
    transformed vertex.  Exact pairwise distances, no spatial index."""
    moved = rel.apply(mesh.vertices)
    return float(np.mean(cdist(mesh.vertices, moved).min(axis=1)))


def auc_score(errors, e_t: float) -> float:
    """Mean of max(1 - e / e_t, 0) over all entries of the error array."""
    if e_t <= 0:
        raise ValueError("error threshold must be positive")
    errors = np.asarray(errors, dtype=float)
    return float(np.mean(np.maximum(1.0 - errors / e_t, 0.0)))
