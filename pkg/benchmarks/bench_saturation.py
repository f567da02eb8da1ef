"""Benchmark: compiled saturation kernel vs the pure Python twin.

Builds a few representative workloads, captures the exact integer-level
kernel input once, then times both kernels on identical input and checks
they produce identical output.

    python3 benchmarks/bench_saturation.py [--scale N] [--repeats K]
"""

import argparse
import importlib
import random
import time

from armordb.model import (
    ClassAssertion,
    DisjointClasses,
    EntityName,
    EquivalentClasses,
    Existential,
    Intersection,
    Named,
    ObjectPropertyAssertion,
    ObjectPropertyRange,
    SubClassOf,
    SubObjectPropertyOf,
)
from armordb.reasoner import normalize, saturate
from armordb.reasoner import _satcore_py

saturate_mod = importlib.import_module("armordb.reasoner.saturate")

try:
    from armordb.reasoner import _satcore
except ImportError:
    _satcore = None


def name(text):
    return EntityName("ex", text)


def cls(text):
    return Named(name(text))


def chain(n):
    """Deep subclass chain: quadratic membership growth."""
    return [SubClassOf(cls(f"C{i}"), cls(f"C{i+1}")) for i in range(n)], []


def ladder(n):
    """Existential ladder with role hierarchy and composition axioms."""
    r, s = name("r"), name("s")
    tbox = [SubObjectPropertyOf(r, s)]
    for i in range(n):
        tbox.append(SubClassOf(cls(f"L{i}"), Existential(r, cls(f"L{i+1}"))))
        tbox.append(SubClassOf(Existential(s, cls(f"L{i+1}")), cls(f"M{i}")))
        tbox.append(SubClassOf(cls(f"M{i}"), cls(f"L{i}")))
    return tbox, []


def random_tbox(n_classes, n_axioms, seed=7):
    rng = random.Random(seed)
    classes = [cls(f"R{i}") for i in range(n_classes)]
    roles = [name(f"p{i}") for i in range(4)]

    def expr(depth=2):
        roll = rng.random()
        if depth == 0 or roll < 0.6:
            return rng.choice(classes)
        if roll < 0.85:
            return Existential(rng.choice(roles), expr(depth - 1))
        return Intersection([expr(depth - 1), expr(depth - 1)])

    tbox = []
    for _ in range(n_axioms):
        roll = rng.random()
        if roll < 0.7:
            tbox.append(SubClassOf(expr(), expr()))
        elif roll < 0.8:
            tbox.append(EquivalentClasses((rng.choice(classes), expr())))
        elif roll < 0.9:
            tbox.append(ObjectPropertyRange(rng.choice(roles), rng.choice(classes)))
        else:
            tbox.append(DisjointClasses((rng.choice(classes), rng.choice(classes))))
    return tbox, []


def scene_abox(n_scenes, seed=11):
    """Many individuals with spatial assertions plus defined scene classes."""
    rng = random.Random(seed)
    kinds = [cls(k) for k in ("Room", "Sphere", "Cube", "Shelf")]
    hasNorth, contains = name("hasNorth"), name("contains")
    tbox = [
        EquivalentClasses((
            cls("Scene"),
            Intersection([
                Existential(hasNorth, cls("Room")),
                Existential(contains, cls("Sphere")),
            ]),
        ))
    ]
    abox = []
    for i in range(n_scenes):
        room, thing = name(f"room{i}"), name(f"obj{i}")
        abox.append(ClassAssertion(cls("Room"), room))
        abox.append(ClassAssertion(rng.choice(kinds), thing))
        abox.append(ObjectPropertyAssertion(hasNorth, name(f"scene{i}"), room))
        abox.append(ObjectPropertyAssertion(contains, name(f"scene{i}"), thing))
    return tbox, abox


class _Recorder:
    """Stand-in kernel that captures the integer-level input."""

    def __init__(self):
        self.args = None

    def saturate_core(self, *args):
        self.args = args
        return _satcore_py.saturate_core(*args)


def capture(tbox, abox):
    recorder = _Recorder()
    original = saturate_mod._kernel
    saturate_mod._kernel = recorder
    try:
        saturate(normalize(tbox), abox)
    finally:
        saturate_mod._kernel = original
    return recorder.args


def best_of(kernel, args, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = kernel.saturate_core(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scale", type=int, default=150, help="workload size knob")
    parser.add_argument("--repeats", type=int, default=3, help="timing repeats, best-of")
    options = parser.parse_args()
    n = options.scale

    workloads = [
        (f"subclass chain ({n * 2} classes)", chain(n * 2)),
        (f"existential ladder ({n})", ladder(n)),
        (f"random tbox ({n} classes, {n * 4} axioms)", random_tbox(n, n * 4)),
        (f"scene abox ({n} scenes)", scene_abox(n)),
    ]

    print(f"{'workload':38} {'atoms':>7} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for label, (tbox, abox) in workloads:
        args = capture(tbox, abox)
        n_atoms = args[0]
        py_time, py_out = best_of(_satcore_py, args, options.repeats)
        if _satcore is None:
            print(f"{label:38} {n_atoms:>7} {py_time*1000:>9.1f}ms {'-':>10} {'-':>8}")
            continue
        c_time, c_out = best_of(_satcore, args, options.repeats)
        assert py_out[0] == c_out[0] and py_out[1] == c_out[1], "kernel outputs differ"
        print(
            f"{label:38} {n_atoms:>7} {py_time*1000:>9.1f}ms {c_time*1000:>9.1f}ms "
            f"{py_time / c_time:>7.1f}x"
        )
    if _satcore is None:
        print("compiled kernel not built; showing pure Python timings only")


if __name__ == "__main__":
    main()
