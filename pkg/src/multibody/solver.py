"""Regularized Newton / KKT solver over a kinematic structure.

Four configurations are supported:

* independent: every body is optimized as a free 6-DoF pose, joints and
  constraints ignored.
* projected: the tree Jacobians project all measurements into the reduced
  joint coordinates; no constraint rows.
* constrained: free 6-DoF bodies coupled only through Lagrange-multiplier
  constraint rows.
* combined: tree projection plus constraint rows (closed chains).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .energy import BodyEnergy
from .kinematics import KinematicStructure
from .se3 import pose_with_variation


class SolverMode(enum.Enum):
    INDEPENDENT = "independent"
    PROJECTED = "projected"
    CONSTRAINED = "constrained"
    COMBINED = "combined"


# Modes where each body keeps its own 6-DoF block instead of joint coordinates.
_FREE_BODY_MODES = (SolverMode.INDEPENDENT, SolverMode.CONSTRAINED)
# Modes where constraint rows enter the system.
_CONSTRAINED_MODES = (SolverMode.CONSTRAINED, SolverMode.COMBINED)


class FactorizationFailed(RuntimeError):
    """KKT system could not be solved reliably (contradictory or duplicate
    constraints, or an indefinite reduced Hessian)."""


@dataclass
class Regularization:
    lambda_r: float = 100.0
    lambda_t: float = 1000.0

    def __post_init__(self):
        if self.lambda_r < 0 or self.lambda_t < 0:
            raise ValueError("regularization parameters must be non-negative")


@dataclass
class SolverConfig:
    mode: SolverMode = SolverMode.PROJECTED
    iterations: int = 1
    regularization: Regularization = field(default_factory=Regularization)

    def __post_init__(self):
        if isinstance(self.mode, str):
            self.mode = SolverMode(self.mode)
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


@dataclass
class KktSystem:
    h_k: np.ndarray
    g_k: np.ndarray
    b_mat: np.ndarray
    b_vec: np.ndarray
    theta_hat: np.ndarray | None = None
    lambda_hat: np.ndarray | None = None


@dataclass
class StepReport:
    theta_norm: float
    residuals_before: list
    residuals_after: list


def effective_jacobians(s: KinematicStructure, mode: SolverMode):
    """Per-body Jacobians and the rotational mask of the unknowns.

    Tree modes use the recursive body Jacobians over the joint coordinates;
    free-body modes give each body a 6-DoF identity block.
    """
    if mode in _FREE_BODY_MODES:
        n = 6 * len(s.bodies)
        jacobians = []
        for i in range(len(s.bodies)):
            j = np.zeros((6, n))
            j[:, 6 * i : 6 * i + 6] = np.eye(6)
            jacobians.append(j)
        rot_mask = np.tile([True] * 3 + [False] * 3, len(s.bodies))
        return jacobians, rot_mask
    jacobians = s.body_jacobians()
    rot_mask = np.zeros(s.n_dof, dtype=bool)
    for i, body in enumerate(s.bodies):
        off = s.dof_offsets[i]
        for k, axis in enumerate(np.flatnonzero(body.joint.free_axes)):
            rot_mask[off + k] = axis < 3
    return jacobians, rot_mask


def assemble(
    s: KinematicStructure,
    energies: list[BodyEnergy],
    mode: SolverMode,
    regularization: Regularization | None = None,
) -> KktSystem:
    """Projected gradient/Hessian plus regularization and constraint rows."""
    if len(energies) != len(s.bodies):
        raise ValueError(
            f"got {len(energies)} energies for {len(s.bodies)} bodies"
        )
    jacobians, rot_mask = effective_jacobians(s, mode)
    n = jacobians[0].shape[1] if jacobians else 0
    h_k = np.zeros((n, n))
    g_k = np.zeros(n)
    for jac, energy in zip(jacobians, energies):
        g_k += jac.T @ energy.g
        h_k += jac.T @ energy.h @ jac
    if regularization is not None:
        diag = np.where(rot_mask, regularization.lambda_r, regularization.lambda_t)
        h_k[np.diag_indices(n)] += diag

    if mode in _CONSTRAINED_MODES and s.constraints:
        b_mat = np.vstack([c.jacobian(s, jacobians) for c in s.constraints])
        b_vec = np.concatenate([c.residual(s) for c in s.constraints])
    else:
        b_mat = np.zeros((0, n))
        b_vec = np.zeros(0)
    return KktSystem(h_k, g_k, b_mat, b_vec)


def solve_kkt(k: KktSystem):
    """Solve the saddle-point system for the variation and the multipliers.

    [[H, B^T], [B, 0]] [theta; lam] = -[g; b], via a pivoted
    symmetric-indefinite factorization, with a post-solve residual check.
    """
    n = k.g_k.shape[0]
    m = k.b_vec.shape[0]
    kkt = np.zeros((n + m, n + m))
    kkt[:n, :n] = 0.5 * (k.h_k + k.h_k.T)
    kkt[:n, n:] = k.b_mat.T
    kkt[n:, :n] = k.b_mat
    rhs = -np.concatenate([k.g_k, k.b_vec])
    try:
        x = scipy.linalg.solve(kkt, rhs, assume_a="sym")
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise FactorizationFailed(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise FactorizationFailed("non-finite solution")
    residual = kkt @ x - rhs
    # Allow the backward error of a stable factorization: near-degenerate
    # systems produce huge solutions whose residual scales with |K| |x|.
    backward = (
        100.0 * (n + m) * np.finfo(float).eps
        * np.linalg.norm(kkt) * np.linalg.norm(x)
    )
    tolerance = 1e-7 * max(1.0, np.linalg.norm(rhs)) + backward
    if np.linalg.norm(residual) > tolerance:
        raise FactorizationFailed(
            "solution does not satisfy the KKT system; constraints are likely "
            "contradictory or duplicated"
        )
    k.theta_hat = x[:n]
    k.lambda_hat = x[n:]
    return k.theta_hat, k.lambda_hat


def apply_update(s: KinematicStructure, theta: np.ndarray, mode: SolverMode):
    """Write the solved variation back into the body poses."""
    if mode in _FREE_BODY_MODES:
        for i, body in enumerate(s.bodies):
            body.pose = pose_with_variation(body.pose, theta[6 * i : 6 * i + 6])
        s.refresh_joint_transforms()
        s.invalidate_jacobians()
    else:
        s.update_poses(theta)


def constraint_residual_norms(s: KinematicStructure) -> list:
    return [float(np.linalg.norm(c.residual(s))) for c in s.constraints]


def step(s: KinematicStructure, provider, cfg: SolverConfig) -> StepReport:
    """One full Newton iteration: energies, assembly, KKT solve, pose update."""
    energies = [provider(i, body.pose) for i, body in enumerate(s.bodies)]
    kkt = assemble(s, energies, cfg.mode, cfg.regularization)
    residuals_before = constraint_residual_norms(s)
    theta, _ = solve_kkt(kkt)
    apply_update(s, theta, cfg.mode)
    return StepReport(
        theta_norm=float(np.linalg.norm(theta)),
        residuals_before=residuals_before,
        residuals_after=constraint_residual_norms(s),
    )


def run(s: KinematicStructure, provider, cfg: SolverConfig) -> list[StepReport]:
    """cfg.iterations consecutive steps; no early exit."""
    return [step(s, provider, cfg) for _ in range(cfg.iterations)]
