"""Mix reading-comprehension records with general-instruction records at a
configured count ratio, with a seeded shuffle of the union.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from random import Random


class MixError(ValueError):
    pass


@dataclass(frozen=True)
class MixPlan:
    ratio_rc: int
    ratio_gi: int
    n_rc: int
    n_gi_target: int
    seed: int = 0
    sampling: str = "truncate"  # or "cycle"


def plan_mix(n_rc: int, ratio: tuple[int, int], seed: int = 0, sampling: str = "truncate") -> MixPlan:
    """Compute how many general-instruction records a ratio asks for.

    ``ratio`` is (rc, gi) by record count; the target is rounded half-up.
    """
    ratio_rc, ratio_gi = ratio
    if ratio_rc < 1 or ratio_gi < 1:
        raise MixError(f"ratio components must be >= 1, got {ratio_rc}:{ratio_gi}")
    if n_rc < 0:
        raise MixError("n_rc must be >= 0")
    if sampling not in ("truncate", "cycle"):
        raise MixError(f"unknown sampling mode {sampling!r}")
    n_gi_target = math.floor(n_rc * ratio_gi / ratio_rc + 0.5)
    return MixPlan(ratio_rc=ratio_rc, ratio_gi=ratio_gi, n_rc=n_rc, n_gi_target=n_gi_target, seed=seed, sampling=sampling)


def mix_records(rc: list[str], gi: list[str], plan: MixPlan) -> list[str]:
    """Select records per the plan and return the seeded permutation."""
    if len(rc) != plan.n_rc:
        raise MixError(f"plan expects {plan.n_rc} reading-comprehension records, got {len(rc)}")
    if plan.sampling == "truncate":
        if len(gi) < plan.n_gi_target:
            raise MixError(
                f"need {plan.n_gi_target} general-instruction records, have {len(gi)} "
                f"(short by {plan.n_gi_target - len(gi)})"
            )
        selected_gi = gi[: plan.n_gi_target]
    else:
        if plan.n_gi_target > 0 and not gi:
            raise MixError("cycle sampling needs at least one general-instruction record")
        selected_gi = [gi[i % len(gi)] for i in range(plan.n_gi_target)]
    mixed = list(rc) + selected_gi
    Random(plan.seed).shuffle(mixed)
    return mixed


def _line_offsets(path: str | os.PathLike) -> list[int]:
    offsets = []
    with open(path, "rb") as fh:
        pos = fh.tell()
        for line in fh:
            if line.strip():
                offsets.append(pos)
            pos += len(line)
    return offsets


def mix_files(
    rc_path: str | os.PathLike,
    gi_path: str | os.PathLike,
    out_path: str | os.PathLike,
    ratio: tuple[int, int],
    seed: int,
    sampling: str = "truncate",
) -> MixPlan:
    """File-level mixing: an in-memory shuffle of line offsets, then one
    sequential write, so record bodies are never all held in memory.
    """
    rc_offsets = _line_offsets(rc_path)
    gi_offsets = _line_offsets(gi_path)
    plan = plan_mix(len(rc_offsets), ratio, seed=seed, sampling=sampling)
    if plan.sampling == "truncate":
        if len(gi_offsets) < plan.n_gi_target:
            raise MixError(
                f"need {plan.n_gi_target} general-instruction records, have {len(gi_offsets)} "
                f"(short by {plan.n_gi_target - len(gi_offsets)})"
            )
        selected = gi_offsets[: plan.n_gi_target]
    else:
        if plan.n_gi_target > 0 and not gi_offsets:
            raise MixError("cycle sampling needs at least one general-instruction record")
        selected = [gi_offsets[i % len(gi_offsets)] for i in range(plan.n_gi_target)]
    index = [(0, off) for off in rc_offsets] + [(1, off) for off in selected]
    Random(seed).shuffle(index)
    with open(rc_path, "rb") as rc_fh, open(gi_path, "rb") as gi_fh, open(out_path, "wb") as out:
        readers = (rc_fh, gi_fh)
        for which, offset in index:
            fh = readers[which]
            fh.seek(offset)
            line = fh.readline()
            if not line.endswith(b"\n"):
                line += b"\n"
            out.write(line)
    return plan
