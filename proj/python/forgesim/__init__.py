"""Entanglement forging, tomography, QSE and PT2 on desk-scale active spaces."""

import json

from ._core import (
    HARTREE_TO_KCAL_PER_MOL,
    CapacityError,
    ConfigError,
    ForgedAnsatz,
    Hamiltonian,
    IntruderStateError,
    NumericalError,
    ParseError,
    StageError,
    ValidationError,
    active_space_hamiltonian,
    count_resources,
    ef_qse,
    forged_energy,
    fci,
    pt2,
    read_fcidump,
    select_bitstrings,
    vqe,
    weighted_pearson,
)
from ._core import barrier as _barrier
from ._core import run_pipeline as _run_pipeline


def run_pipeline(config, output=None):
    """Run an INI config. Returns (report, timings) as dicts."""
    report, timings = _run_pipeline(config, output)
    return json.loads(report), json.loads(timings)


def barrier(reactants, transition_state):
    """Barrier for every energy present in all reports (hartree and kcal/mol)."""
    return json.loads(
        _barrier([json.dumps(r) for r in reactants], json.dumps(transition_state))
    )


__all__ = [name for name in dir() if not name.startswith("_")]
