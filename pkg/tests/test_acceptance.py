"""The twelve acceptance criteria, run exactly as stated.

Each test prints one ``criterion N: PASS|FAIL`` line (visible with ``-s``;
the lines are also repeated in the pytest terminal summary).  Running this
file directly prints the same lines without pytest:

    python3 tests/test_acceptance.py
"""

from __future__ import annotations

import json
import random
import subprocess
import sys
import time
from importlib import resources

import pytest

from dliekit import library as lib
from dliekit.cochain_chern import chern_cochain, chern_relation_check
from dliekit.connection import (
    correspondence_report,
    curvature_transfer_check,
    curvature_type_check,
    diff_order_report,
    idempotent_curvature_check,
)
from dliekit.dlie import check_dlie_axioms
from dliekit.jet_atiyah import splitting_round_trip
from dliekit.lie_rinehart import ScalarCochain
from dliekit.nonabelian import check_end_dlie_axioms, image_order_check, rho_shriek_hom_check
from dliekit.poly_core import Derivation
from dliekit.tensor_env import (
    DEFAULT_BUDGET,
    QuotientKind,
    almost_comm_witness,
    curvature_generators,
    evaluate,
    ideal_annihilation_check,
    normal_form,
    normal_form_ex,
    random_tensor,
)

RESULTS: dict[int, str] = {}

ALL_CONNECTIONS = {**lib.connections(), **lib.psi_variants()}
PSI_ID = lib.connections()


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS[n] = line
    print(line)


# 1 ---------------------------------------------------------------------------


def criterion_1():
    t = time.perf_counter()
    failures = {}
    for name in lib.pairs():
        rep = check_dlie_axioms(lib.extension(name), samples=50, max_deg=2, seed=0)
        if not rep.passed:
            failures[name] = [c.name for c in rep.failures()]
    secs = time.perf_counter() - t
    kinds = {lib.pairs()[n].lie.nvars for n in lib.pairs()}
    ok = not failures and len(lib.pairs()) >= 5 and kinds == {1, 2} and secs < 5
    return ok, f"{len(lib.pairs())} pairs, failures={failures or 0}, {secs:.2f}s"


# 2 ---------------------------------------------------------------------------


def criterion_2():
    bad = {}
    for name, rho in ALL_CONNECTIONS.items():
        rep = curvature_transfer_check(rho, samples=50, seed=0)
        if not rep.passed:
            bad[name] = [c.name for c in rep.failures()]
    return not bad, f"{len(ALL_CONNECTIONS)} connections, generator pairs + 50 random pairs each, failures={bad or 0}"


# 3 ---------------------------------------------------------------------------


def criterion_3():
    bad = []
    for name, rho in ALL_CONNECTIONS.items():
        if correspondence_report(rho).get("round_trip").status != "pass":
            bad.append(f"psi:{name}")
        if not splitting_round_trip(rho):
            bad.append(f"jet:{name}")
    return not bad, f"{len(ALL_CONNECTIONS)} connections, psi and splitting round trips, failures={bad or 0}"


# 4 ---------------------------------------------------------------------------


def criterion_4():
    T = lib.extension("der2_x")
    bad = []
    max_steps = 0
    for kind in QuotientKind:
        rng = random.Random(0)
        for k in range(100):
            el = random_tensor(rng, T, max_len=4)
            res = normal_form_ex(el, kind, budget=DEFAULT_BUDGET)
            max_steps = max(max_steps, res.steps)
            if normal_form(res.element, kind) != res.element:
                bad.append(f"idempotence {kind.value} #{k}")
            if kind.tilde and normal_form(el, kind, "rightmost") != res.element:
                bad.append(f"confluence {kind.value} #{k}: {el}")
    return not bad, f"4 kinds x 100 elements, max steps {max_steps} <= {DEFAULT_BUDGET}, failures={bad or 0}"


# 5 ---------------------------------------------------------------------------


def criterion_5():
    bad = []
    for name, rho in PSI_ID.items():
        rng = random.Random(0)
        for k in range(50):
            el = random_tensor(rng, rho.source, max_len=3, max_coeff_deg=2)
            direct = evaluate(el, rho)
            for kind in (QuotientKind.UTensor, QuotientKind.URho):
                if evaluate(normal_form(el, kind), rho) != direct:
                    bad.append(f"{name} {kind.value} #{k}")
    return not bad, f"{len(PSI_ID)} connections x 50 elements x 2 kinds, failures={bad or 0}"


# 6 ---------------------------------------------------------------------------


def criterion_6():
    t = time.perf_counter()
    algebras = ["der2_x", "der2_const", "aff1_zero"]
    bad = []
    for name in algebras:
        T = lib.extension(name)
        for kind in (QuotientKind.UTensorTilde, QuotientKind.URhoTilde):
            rng = random.Random(0)
            for k in range(100):
                x = random_tensor(rng, T, max_len=3, max_coeff_deg=2)
                y = random_tensor(rng, T, max_len=3, max_coeff_deg=2)
                if not almost_comm_witness(x, y, kind)["ok"]:
                    bad.append(f"{name} {kind.value} #{k}")
    secs = time.perf_counter() - t
    return not bad and secs < 30, f"{len(algebras)} algebras x 2 kinds x 100 pairs, failures={bad or 0}, {secs:.2f}s"


# 7 ---------------------------------------------------------------------------


def criterion_7():
    rho = lib.connection("curvature_type")
    T = rho.source
    one = lib.curvature_type_form("curvature_type")
    zero = ScalarCochain.zero(T.nvars, T.n, 2)
    rows = []
    for f, expected in ((one, True), (zero, False)):
        ann = bool(ideal_annihilation_check(rho, curvature_generators(T, f)))
        ct = bool(curvature_type_check(rho, f))
        rows.append(ann == ct == expected)
    return all(rows), f"f=1: annihilated and curvature type; f=0: neither ({rows})"


# 8 ---------------------------------------------------------------------------


def criterion_8():
    pb = lib.projective_bases()["uw"]
    dx, dy = Derivation.partial(2, 0), Derivation.partial(2, 1)
    rep = idempotent_curvature_check(pb, dx, dy)
    M = pb.phi.derive(dx).commutator(pb.phi.derive(dy))
    ok = rep.passed and rep.M == M and rep.get("kernel_preserved").status == "pass"
    return ok, f"R(dx, dy) = [dx phi, dy phi] on the image, kernel preserved, M = {M}"


# 9 ---------------------------------------------------------------------------


def criterion_9():
    rho = lib.connection("nilpotent")
    ax = check_end_dlie_axioms(rho, samples=50, seed=0)
    hom = rho_shriek_hom_check(rho, samples=50, seed=0)
    orders = image_order_check(rho, degree=3, seed=0)
    fails = [c.name for r in (ax, hom, orders) for c in r.failures()]
    return not fails, f"End axioms incl. Jacobi on 50 triples, hom law on 50 pairs, orders at degree 3, failures={fails or 0}"


# 10 --------------------------------------------------------------------------


def criterion_10():
    rho4, f4 = lib.chern_example(4)
    rho6, f6 = lib.chern_example(6)
    split, fs = lib.chern_example(4, curvature_type=False)
    k2 = chern_relation_check(rho4, f4, 2)
    k3 = chern_relation_check(rho6, f6, 3)
    neg = chern_relation_check(split, fs, 2, require_curvature_type=False)
    ok = bool(k2) and bool(k3) and not neg and neg.witness["value"] != "0"
    c3 = chern_cochain(rho6, 3).on_gens(tuple(range(6)))
    return ok, f"k=2 rank 4 ok, k=3 rank 6 ok (c3 = {c3}), split witness {neg.witness}"


# 11 --------------------------------------------------------------------------


def criterion_11():
    bad = {}
    for name, rho in ALL_CONNECTIONS.items():
        rep = diff_order_report(rho, seed=0)
        if not rep.passed:
            bad[name] = [c.name for c in rep.failures()]
    return not bad, f"{len(ALL_CONNECTIONS)} connections (psi = Id and general psi), failures={bad or 0}"


# 12 --------------------------------------------------------------------------


def criterion_12():
    corpus = sorted(p for p in resources.files("dliekit").joinpath("corpus").iterdir() if p.name.endswith(".dlie"))
    t = time.perf_counter()
    outputs = []
    status = []
    for _ in range(2):
        run = []
        for p in corpus:
            proc = subprocess.run(
                [sys.executable, "-m", "dliekit", "run", str(p), "--json", "--seed", "0"],
                capture_output=True,
            )
            run.append(proc.stdout)
            status.append(proc.returncode == 0 and json.loads(proc.stdout)["status"] == "pass")
        outputs.append(run)
    secs = (time.perf_counter() - t) / 2
    same = outputs[0] == outputs[1]
    ok = all(status) and same and secs < 60
    return ok, f"{len(corpus)} files, all pass={all(status)}, byte-identical reruns={same}, {secs:.2f}s per run"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12]


@pytest.mark.parametrize("n", range(1, 13), ids=lambda n: f"criterion_{n}")
def test_criterion(n):
    ok, detail = CRITERIA[n - 1]()
    report(n, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for n, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        report(n, ok, detail)
        failed += not ok
    sys.exit(1 if failed else 0)
