"""Constraint-convergence study at demo scale.

Runs Newton iterations on a two-body constraint from random initial pose
differences and prints error percentiles per iteration.  The rotation-vector
and translation constraints converge in a single iteration; the full 6-DoF
constraint and the orthogonality baseline need several, and orthogonality
settles into spurious solutions (rotational error pi or 2*pi/3) in a
noticeable fraction of trials.

Run from the repository root:  python3 demos/convergence_study.py
"""

import numpy as np

from multibody.experiments import run_convergence_study

TRIALS = 2000
ITERATIONS = 4

for kind in ("rotvec", "trans", "full", "ortho"):
    study = run_convergence_study(TRIALS, ITERATIONS, kind, seed=0)
    print(f"\n=== {kind} constraint, {TRIALS} trials ===")
    print("iter   rot p50      rot p99      trans p50    trans p99")
    for it in range(ITERATIONS + 1):
        r50, r99 = np.percentile(study.rot_errors[:, it], [50, 99])
        t50, t99 = np.percentile(study.trans_errors[:, it], [50, 99])
        print(f"{it:4d}   {r50:.3e}   {r99:.3e}   {t50:.3e}   {t99:.3e}")
    if kind == "ortho":
        final = study.rot_errors[:, ITERATIONS]
        spurious = np.sum(
            (np.abs(final - np.pi) < 1e-3) | (np.abs(final - 2 * np.pi / 3) < 1e-3)
        )
        print(f"trials near the spurious solutions pi or 2pi/3: {spurious}")
