"""JSON configuration loading for structures, constraints, and trajectories.

The file format is a plain JSON object:

* bodies: ordered list; each entry has name, parent (name or null), joint
  {axes, fixed_side, joint_to_model, parent_to_joint}, pose, optional
  mesh_path (relative to the config file) and weights {rot, trans}.
* constraints: list of {body_a, body_b, frame_a, frame_b, axes} with an
  optional type of "pose" (default) or "orthogonality".
* trajectory: per-body sinusoidal joint programs {amplitude, period, phase}.
* e_t: error threshold in meters for the area-under-curve score.
* iterations: solver iterations per tracking step.

Poses are written as {"rotvec": [x, y, z], "trans": [x, y, z]}; both keys
default to zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constraints import Constraint, OrthogonalityConstraint
from .kinematics import Body, FixedSide, Joint, KinematicStructure, axes_mask
from .metrics import Mesh, load_obj
from .se3 import Pose


class ConfigError(Exception):
    """Invalid or inconsistent configuration file."""


@dataclass
class JointProgram:
    """Sinusoidal joint values q(step) = amplitude * sin(2 pi step / period + phase)."""

    amplitude: np.ndarray
    period: float
    phase: float = 0.0

    def values(self, step: int) -> np.ndarray:
        return self.amplitude * np.sin(2.0 * np.pi * step / self.period + self.phase)


@dataclass
class TrackingConfig:
    structure: KinematicStructure
    meshes: dict = field(default_factory=dict)  # body index -> Mesh
    weights: dict = field(default_factory=dict)  # body index -> (w_rot, w_trans)
    trajectory: dict = field(default_factory=dict)  # body index -> JointProgram
    e_t: float = 0.1
    iterations: int = 3


def _expect(obj, key, where, default=None, required=False):
    if key not in obj:
        if required:
            raise ConfigError(f"{where}: missing required field {key!r}")
        return default
    return obj[key]


def _parse_vec3(value, where):
    try:
        vec = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: expected a list of 3 numbers") from exc
    if vec.shape != (3,):
        raise ConfigError(f"{where}: expected exactly 3 numbers, got shape {vec.shape}")
    return vec


def _parse_pose(value, where) -> Pose:
    if value is None:
        return Pose.identity()
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: expected an object with rotvec/trans")
    rotvec = _parse_vec3(value.get("rotvec", (0.0, 0.0, 0.0)), f"{where}.rotvec")
    trans = _parse_vec3(value.get("trans", (0.0, 0.0, 0.0)), f"{where}.trans")
    return Pose.from_rotvec(rotvec, trans)


def _parse_joint(value, where) -> Joint:
    if value is None:
        value = {}
    axes = _expect(value, "axes", where, default=[])
    try:
        mask = axes_mask(axes)
    except ValueError as exc:
        raise ConfigError(f"{where}.axes: {exc}") from exc
    fixed_side = _expect(value, "fixed_side", where, default="joint_to_model")
    try:
        side = FixedSide(fixed_side)
    except ValueError as exc:
        raise ConfigError(
            f"{where}.fixed_side: {fixed_side!r} is not a valid choice"
        ) from exc
    return Joint(
        free_axes=mask,
        joint_to_model=_parse_pose(value.get("joint_to_model"), f"{where}.joint_to_model"),
        parent_to_joint=_parse_pose(value.get("parent_to_joint"), f"{where}.parent_to_joint"),
        fixed_side=side,
    )


def load_config(path) -> TrackingConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return parse_config(raw, base_dir=path.parent)


def parse_config(raw: dict, base_dir=None) -> TrackingConfig:
    base_dir = Path(base_dir) if base_dir is not None else Path(".")
    body_entries = _expect(raw, "bodies", "config", required=True)
    if not isinstance(body_entries, list) or not body_entries:
        raise ConfigError("config.bodies: expected a non-empty list")

    bodies = []
    names = {}
    meshes = {}
    weights = {}
    for i, entry in enumerate(body_entries):
        where = f"bodies[{i}]"
        name = _expect(entry, "name", where, required=True)
        if name in names:
            raise ConfigError(f"{where}: duplicate body name {name!r}")
        parent_name = _expect(entry, "parent", where)
        if parent_name is None:
            parent = None
        elif parent_name in names:
            parent = names[parent_name]
        else:
            raise ConfigError(
                f"{where}.parent: {parent_name!r} must name an earlier body"
            )
        joint = _parse_joint(entry.get("joint"), f"{where}.joint")
        pose = _parse_pose(entry.get("pose"), f"{where}.pose")
        bodies.append(Body(name=name, joint=joint, pose=pose, parent=parent))
        names[name] = i

        mesh_path = _expect(entry, "mesh_path", where)
        if mesh_path is not None:
            try:
                meshes[i] = load_obj(base_dir / mesh_path)
            except (OSError, ValueError) as exc:
                raise ConfigError(f"{where}.mesh_path: {exc}") from exc
        weight_entry = entry.get("weights", {})
        weights[i] = (
            float(weight_entry.get("rot", 1.0)),
            float(weight_entry.get("trans", 1.0)),
        )

    constraints = []
    for i, entry in enumerate(raw.get("constraints", [])):
        where = f"constraints[{i}]"
        kind = _expect(entry, "type", where, default="pose")
        body_a = _expect(entry, "body_a", where, required=True)
        body_b = _expect(entry, "body_b", where, required=True)
        for label, value in (("body_a", body_a), ("body_b", body_b)):
            if value not in names:
                raise ConfigError(f"{where}.{label}: unknown body {value!r}")
        frame_a = _parse_pose(entry.get("frame_a"), f"{where}.frame_a")
        frame_b = _parse_pose(entry.get("frame_b"), f"{where}.frame_b")
        if kind == "pose":
            axes = _expect(entry, "axes", where, required=True)
            try:
                mask = axes_mask(axes)
            except ValueError as exc:
                raise ConfigError(f"{where}.axes: {exc}") from exc
            constraints.append(
                Constraint(names[body_a], names[body_b], frame_a, frame_b, mask)
            )
        elif kind == "orthogonality":
            constraints.append(
                OrthogonalityConstraint(names[body_a], names[body_b], frame_a, frame_b)
            )
        else:
            raise ConfigError(f"{where}.type: unknown constraint type {kind!r}")

    try:
        structure = KinematicStructure(bodies, constraints)
    except ValueError as exc:
        raise ConfigError(f"config.bodies: {exc}") from exc

    trajectory = {}
    for name, entry in raw.get("trajectory", {}).items():
        where = f"trajectory[{name!r}]"
        if name not in names:
            raise ConfigError(f"{where}: unknown body {name!r}")
        index = names[name]
        n_dof = structure.bodies[index].joint.n_dof
        amplitude = np.asarray(
            _expect(entry, "amplitude", where, required=True), dtype=float
        ).reshape(-1)
        if amplitude.shape != (n_dof,):
            raise ConfigError(
                f"{where}.amplitude: expected {n_dof} values for the joint's "
                f"free axes, got {amplitude.shape[0]}"
            )
        period = float(_expect(entry, "period", where, required=True))
        if period <= 0:
            raise ConfigError(f"{where}.period: must be positive")
        trajectory[index] = JointProgram(
            amplitude=amplitude,
            period=period,
            phase=float(entry.get("phase", 0.0)),
        )

    e_t = float(raw.get("e_t", 0.1))
    if e_t <= 0:
        raise ConfigError("config.e_t: must be positive")
    iterations = int(raw.get("iterations", 3))
    if iterations < 1:
        raise ConfigError("config.iterations: must be >= 1")

    return TrackingConfig(
        structure=structure,
        meshes=meshes,
        weights=weights,
        trajectory=trajectory,
        e_t=e_t,
        iterations=iterations,
    )
