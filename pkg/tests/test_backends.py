"""The compiled and pure Python saturation kernels must be observationally
identical: same memberships, same role edges, for any well-formed input."""

import importlib
import os
import random
import subprocess
import sys

import pytest

saturate_mod = importlib.import_module("armordb.reasoner.saturate")
from armordb.model import is_terminological
from armordb.reasoner import BACKEND, normalize, saturate
from armordb.reasoner import _satcore_py

from gen import random_micro_ontology

try:
    from armordb.reasoner import _satcore
except ImportError:
    _satcore = None

needs_compiled = pytest.mark.skipif(
    _satcore is None, reason="compiled kernel not built"
)


def random_kernel_input(rng):
    n_atoms = rng.randint(2, 14)
    n_roles = rng.randint(0, 3)

    def atom():
        return rng.randrange(n_atoms)

    def role():
        return rng.randrange(n_roles)

    nf1 = [(atom(), atom()) for _ in range(rng.randint(0, 12))]
    nf2 = [(atom(), atom(), atom()) for _ in range(rng.randint(0, 8))]
    nf3 = []
    nf4 = []
    edges = []
    role_sup = [[r] for r in range(n_roles)]
    if n_roles:
        nf3 = [(atom(), role(), atom()) for _ in range(rng.randint(0, 8))]
        nf4 = [(role(), atom(), atom()) for _ in range(rng.randint(0, 8))]
        edges = [(role(), atom(), atom()) for _ in range(rng.randint(0, 6))]
        # random reflexive-transitive closure rows
        incs = [(role(), role()) for _ in range(rng.randint(0, 3))]
        supers = {r: {r} for r in range(n_roles)}
        changed = True
        while changed:
            changed = False
            for sub, sup in incs:
                add = supers[sup] - supers[sub]
                if add:
                    supers[sub] |= add
                    changed = True
        role_sup = [sorted(supers[r]) for r in range(n_roles)]
    seeds = [(atom(), atom()) for _ in range(rng.randint(0, 5))]
    return n_atoms, n_roles, nf1, nf2, nf3, nf4, role_sup, seeds, edges


@needs_compiled
def test_kernels_agree_on_random_inputs():
    rng = random.Random(2024)
    for _ in range(400):
        args = random_kernel_input(rng)
        subs_c, rel_c = _satcore.saturate_core(*args)
        subs_p, rel_p = _satcore_py.saturate_core(*args)
        assert subs_c == subs_p
        assert rel_c == rel_p


@needs_compiled
def test_backends_give_identical_inference(monkeypatch):
    rng = random.Random(77)
    for _ in range(120):
        axioms = random_micro_ontology(rng)
        tbox = [a for a in axioms if is_terminological(a)]
        abox = [a for a in axioms if not is_terminological(a)]
        ntbox = normalize(tbox)

        monkeypatch.setattr(saturate_mod, "_kernel", _satcore)
        compiled = saturate(ntbox, abox)
        monkeypatch.setattr(saturate_mod, "_kernel", _satcore_py)
        pure = saturate(ntbox, abox)

        assert compiled.consistent == pure.consistent
        assert compiled.subsumption_set == pure.subsumption_set
        assert compiled.realization.types == pure.realization.types


def test_backend_reports_a_known_name():
    assert BACKEND in ("compiled", "python")


def test_env_var_forces_pure_python():
    env = dict(os.environ, ARMORDB_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from armordb.reasoner import BACKEND; print(BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "python"
