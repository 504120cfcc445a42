"""Command-line verification driver and exact evaluator.

Subcommands
-----------

``parconn verify GROUP``
    Run the identity suites of one group (or ``all``) and print a report.
    Groups: bundles, involution, tpsi, basechange, symplectic, lagrangian,
    fixedlocus, localmodel, apparent, fibers, monodromy, all.

``parconn eval OBJECT --at name=value ...``
    Evaluate one of the closed-form objects exactly at a rational point and
    print a canonical serialization.  Objects: z, w, ubar, Tpsi, B, J,
    Cinv, Phi, AppInf, AppPsi, M.  Assignment names: l (or lam), t, nu,
    u_l (or ul), u_t (or ut), c1, c2; values are rationals ``p/q`` or one
    of the assignment names (kept symbolic).

``parconn report --format json|markdown --path OUT --from SRC``
    Re-render a report previously saved with ``verify --out``.

Exit codes: 0 all checks passed, 1 check or evaluation failure, 2 usage
error, 3 internal error.

Reports serialized as JSON are byte-identical across runs with the same
seed, parameters, and mode; golden copies live in ``golden/v1`` next to
this module and are refreshed with ``--bless``.
"""

from __future__ import annotations

import argparse
import functools
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import apparent as ap
from . import family as fam
from . import involution as inv
from . import monodromy as mono
from .connections import INFINITY_KEY, NonGenericError
from .involution import ALPHA, DELTA, P_LAMBDA, P_PI, P_SIGMA
from .linalg import MatrixRF
from .poly import ExactDivisionError, MPoly, var
from .rat import as_rat, rat_str
from .ratfunc import RatFunc, as_ratfunc
from .report import PLUMBING, CheckRecord, VerificationReport
from .sampling import random_assignment, seed_stream

GROUPS = (
    "bundles",
    "involution",
    "tpsi",
    "basechange",
    "symplectic",
    "lagrangian",
    "fixedlocus",
    "localmodel",
    "apparent",
    "fibers",
    "monodromy",
)

EVAL_OBJECTS = (
    "z",
    "w",
    "ubar",
    "Tpsi",
    "B",
    "J",
    "Cinv",
    "Phi",
    "AppInf",
    "AppPsi",
    "M",
)

# Default parameter specializations: three generic rational triples
# (l, t, nu) staying away from the forbidden values {0, 1} and from each
# other, with 2*nu never an integer.
BUILTIN_TRIPLES = (("2", "3", "1/5"), ("3", "5", "1/7"), ("-2", "1/2", "2/3"))

MODE_FLAGS = {"exact": "exact-symbolic", "specialized": "specialized", "sampled": "sampled"}

DEFAULT_SEED = 0
DEFAULT_FIBER_TRIALS = 5
DEFAULT_MONODROMY_TRIALS = 20

GOLDEN_DIR = Path(__file__).resolve().parent / "golden" / "v1"

_IDENTITY3 = MatrixRF.identity(3)


# ----------------------------------------------------------------------
# Check registry
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class RunContext:
    """Everything a single check invocation may depend on."""

    params: Optional[Dict[str, object]]
    label: str
    seed: int
    trials: Optional[int]
    triple_index: int = 0


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    ref: str
    mode: str
    scope: str  # "triple" or "global"
    fn: Callable[[RunContext], Tuple[bool, str]]
    needs_full_symbolic: bool = False


@functools.lru_cache(maxsize=None)
def _cached_point(seed: int, triple_index: int, lam_s: str, t_s: str) -> tuple:
    """A deterministic generic sample (ul, ut, c1, c2) for one triple."""
    lam, t = as_rat(lam_s), as_rat(t_s)
    child = seed_stream(seed, triple_index + 1)[triple_index]
    point = random_assignment(
        child,
        ("ul", "ut", "c1", "c2"),
        avoid_values={"ul": (0, 1, lam), "ut": (0, 1, lam, t)},
        avoid_polys=[P_PI, P_SIGMA, P_LAMBDA],
        distinct=False,
        base={"lam": lam, "t": t},
        bound=60,
    )
    return (point["ul"], point["ut"], point["c1"], point["c2"])


def _sample(ctx: RunContext) -> tuple:
    return _cached_point(
        ctx.seed,
        ctx.triple_index,
        rat_str(ctx.params["lam"]),
        rat_str(ctx.params["t"]),
    )


# -- bundles -----------------------------------------------------------

def _chk_higgs_flags(ctx: RunContext):
    parab = fam.standard_parabolic()
    ok = fam.theta1().check_higgs(parab) and fam.theta2().check_higgs(parab)
    return ok, "both twisted endomorphisms vanish on the flag directions"


def _chk_trace_free(ctx: RunContext):
    sys = fam.family()
    ok = all(sys.residue_at(k).trace().is_zero() for k in sys.poles)
    return ok, "every residue of the family is trace-free"


def _chk_flag_eigenvalues(ctx: RunContext):
    spec = fam.standard_spectral()
    eig = fam.flag_eigenvalues(fam.family(), fam.standard_parabolic())
    ok = all(
        spec.at(key)[0] == eig[key]
        for key in ("0", "1", "lam", "t", INFINITY_KEY)
    )
    return ok, "flag directions are residue eigendirections with the stated eigenvalues"


def _chk_flags_at_point(ctx: RunContext):
    ul, ut, c1, c2 = _sample(ctx)
    point = {"ul": ul, "ut": ut, "c1": c1, "c2": c2, **ctx.params}
    sys = fam.family().subst(point)
    eig = fam.flag_eigenvalues(sys, fam.standard_parabolic().subst(point))
    spec = fam.standard_spectral()
    ok = all(
        as_ratfunc(spec.at(key)[0]).subst(point) == eig[key]
        for key in ("0", "1", "lam", "t", INFINITY_KEY)
    )
    return ok, f"sampled point ul={rat_str(ul)} ut={rat_str(ut)}"


# -- involution --------------------------------------------------------

def _chk_special_identities(ctx: RunContext):
    results = inv.invariant_identities()
    ok = all(results.values())
    return ok, ", ".join(f"{k}={v}" for k, v in sorted(results.items()))


def _chk_involution_symbolic(ctx: RunContext):
    ub = inv.ubar_t()
    ok = ub.subst({"ut": ub}) == RatFunc.from_var("ut")
    return ok, "the coordinate involution composes to the identity symbolically"


def _chk_involution_at_point(ctx: RunContext):
    ul, ut, _, _ = _sample(ctx)
    u = (ul, ut)
    ub = inv.ubar_t(u, ctx.params)
    back = inv.ubar_t((ul, ub), ctx.params)
    psi = inv.psi_bun(u, ctx.params)
    ok = back == ut and psi[0] == ul and psi[1] == ub
    return ok, f"involution fixed-free swap at ul={rat_str(ul)} ut={rat_str(ut)}"


# -- tpsi --------------------------------------------------------------

def _chk_transport_composition(ctx: RunContext):
    prod = inv.t_psi_paper(None, ctx.params) * inv.t_at_psi(None, ctx.params)
    return prod == _IDENTITY3, "T(u) . T(psi u) = Id with parameters specialized"


def _chk_transport_derived(ctx: RunContext):
    ok = inv.t_psi_derived(None, ctx.params) == inv.t_psi_paper(None, ctx.params)
    return ok, "derived transport equals the closed form entrywise"


def _chk_transport_derived_symbolic(ctx: RunContext):
    ok = inv.t_psi_derived() == inv.t_psi_paper()
    return ok, "fully symbolic entrywise equality"


# -- basechange --------------------------------------------------------

def _chk_gauge_linearizes(ctx: RunContext):
    try:
        inv.b_matrix(None, ctx.params, check=True)
    except AssertionError as exc:
        return False, str(exc)
    return True, "B . (Id + T(psi u)) = 2 Id"


def _chk_gauge_roundtrip(ctx: RunContext):
    bmat = inv.b_matrix(None, ctx.params, check=False)
    ok = bmat * inv.b_inverse(None, ctx.params) == _IDENTITY3
    return ok, "B . B^-1 = Id"


def _chk_frame_roundtrip(ctx: RunContext):
    ok = inv.c_matrix(None, ctx.params) * inv.c_inverse(None, ctx.params) == _IDENTITY3
    return ok, "C . C^-1 = Id"


def _chk_gauge_det_identity(ctx: RunContext):
    bmat = inv.b_matrix(None, None, check=False)
    lhs = bmat.det() * as_ratfunc(P_LAMBDA * P_SIGMA)
    ok = lhs == as_ratfunc(2 * P_PI * P_PI)
    return ok, "det(B) p_lambda p_sigma = 2 p_pi^2 symbolically"


def _plam_multiplicity(poly: MPoly, plam: MPoly) -> int:
    count = 0
    while True:
        try:
            poly = poly.exact_div(plam)
        except ExactDivisionError:
            return count
        count += 1


def _chk_frame_regular_on_wall(ctx: RunContext):
    plam = P_LAMBDA.subst_rat(ctx.params)
    jinv = inv.j_inverse(None, ctx.params)
    for i in range(3):
        for j in range(3):
            entry = jinv[i, j]
            if entry.num.is_zero():
                continue
            if _plam_multiplicity(entry.den, plam) > _plam_multiplicity(entry.num, plam):
                return False, f"entry ({i},{j}) keeps a p_lambda pole"
    return True, "J^-1 has no p_lambda pole in any entry"


# -- symplectic --------------------------------------------------------

def _chk_symplectic_factor(ctx: RunContext):
    ok = inv.verify_symplectic_factor(ctx.params)
    return ok, "coordinate pullback equals twice the standard form"


# -- lagrangian --------------------------------------------------------

def _chk_lagrangian_difference(ctx: RunContext):
    ok = inv.verify_lagrangian()["difference_vanishes"]
    return ok, "d/d(u_l) of c1 equals d/d(u_t) of c2 symbolically"


def _chk_lagrangian_sum_pinned(ctx: RunContext):
    ok = not inv.verify_lagrangian()["sum_vanishes"]
    return ok, "the sum of the two partial derivatives is nonzero (pinned)"


# -- fixedlocus --------------------------------------------------------

def _chk_fixed_rows(ctx: RunContext):
    ok = inv.fixed_locus(ctx.params)["rows_in_sigma_ideal"]
    return ok, "fixed rows lie in the ideal of the sigma conic"


def _chk_fixed_opposite_sign(ctx: RunContext):
    ok = inv.fixed_locus(ctx.params)["opposite_sign_rejected"]
    return ok, "the opposite-sign section fails membership (pinned)"


def _chk_fixed_generic(ctx: RunContext):
    ok = inv.fixed_locus(ctx.params)["generic_c1_rejected"]
    return ok, "a generic section fails membership (pinned)"


# -- localmodel --------------------------------------------------------

def _chk_local_model(ctx: RunContext):
    return inv.verify_local_model(), "quotient-cone coordinates and residual form"


# -- apparent ----------------------------------------------------------

def _chk_app_infty_base(ctx: RunContext):
    lam, t = RatFunc.from_var("lam"), RatFunc.from_var("t")
    target = fam.AppClass.make([lam * t, -(lam + t), RatFunc.one()])
    ok = fam.app_infty(fam.nabla0()).proportional_to(target)
    return ok, "tangency class of the base connection is [l t : -(l+t) : 1]"


def _chk_app_pair_invariant(ctx: RunContext):
    ul, ut, c1, c2 = _sample(ctx)
    u, c = (ul, ut), (c1, c2)
    tmat = inv.t_psi_paper(u, ctx.params)
    cp = tuple(v.eval_rat({}) for v in inv.transport_coeffs(tmat, c))
    psi_u = inv.psi_bun(u, ctx.params)
    ok = ap.app_c(u, c, ctx.params) == ap.app_c(psi_u, cp, ctx.params)
    return ok, f"unordered tangency pair fixed at ul={rat_str(ul)} ut={rat_str(ut)}"


def _chk_pair_matrix_inverts(ctx: RunContext):
    ul, ut, _, _ = _sample(ctx)
    u = (ul, ut)
    ub = inv.ubar_t(u, ctx.params)
    prod = ap.m_matrix((ul, ub), ctx.params) * ap.m_matrix(u, ctx.params)
    pivot = prod[0, 0].eval_rat({})
    if pivot == 0:
        return False, "diagonal pivot vanished"
    for i in range(3):
        for j in range(3):
            if i == j:
                if prod[i, j].eval_rat({}) != pivot:
                    return False, f"diagonal entry ({i},{i}) differs"
            elif not prod[i, j].is_zero():
                return False, f"off-diagonal entry ({i},{j}) nonzero"
    return True, "M(psi u) . M(u) is a nonzero scalar matrix"


# -- fibers ------------------------------------------------------------

def _chk_fiber_counts(ctx: RunContext):
    trials = ctx.trials or DEFAULT_FIBER_TRIALS
    child = seed_stream(ctx.seed, ctx.triple_index + 1)[ctx.triple_index]
    reports = ap.fiber_count_trials(trials, child, dict(ctx.params))
    counts = [r.count for r in reports]
    ok = all(count == 12 for count in counts)
    return ok, f"counts={counts}"


# -- monodromy ---------------------------------------------------------

def _chk_descent_round_trip(ctx: RunContext):
    trials = ctx.trials or DEFAULT_MONODROMY_TRIALS
    nu = ctx.params["nu"]
    worst = 0.0
    for i in range(trials):
        rho = mono.random_rep_c([ctx.seed, ctx.triple_index, i], nu)
        rebuilt = mono.phi_top(mono.descend(rho))
        gap = float(
            np.max(np.abs(mono.trace_coords(rebuilt) - mono.trace_coords(rho)))
        )
        worst = max(worst, gap)
    return worst <= mono.ROUND_TRIP_TOL, f"max trace-coordinate gap {worst:.3e}"


def _chk_descent_square(ctx: RunContext):
    trials = ctx.trials or DEFAULT_MONODROMY_TRIALS
    nu = ctx.params["nu"]
    eye = np.eye(2, dtype=complex)
    worst = 0.0
    for i in range(trials):
        rho = mono.random_rep_c([ctx.seed, ctx.triple_index, i], nu)
        m = mono.descend_matrix(rho)
        worst = max(worst, float(np.max(np.abs(m @ m + eye))))
    return worst <= mono.SQUARE_TOL, f"max defect of M^2 + I is {worst:.3e}"


def _chk_descent_twins(ctx: RunContext):
    trials = ctx.trials or DEFAULT_MONODROMY_TRIALS
    nu = ctx.params["nu"]
    least = float("inf")
    for i in range(trials):
        rho = mono.random_rep_c([ctx.seed, ctx.triple_index, i], nu)
        r = mono.descend(rho)
        gap = float(
            np.max(np.abs(mono.p1_trace_coords(r) - mono.p1_trace_coords(mono.psi_top(r))))
        )
        least = min(least, gap)
    return least > 1e-6, f"min twin fingerprint gap {least:.3e}"


def _chk_dihedral_diagonal(ctx: RunContext):
    rng = mono.trial_rng(ctx.seed, 977)
    worst = 0.0
    for _ in range(20):
        modulus = rng.uniform(0.5, 2.0, size=2)
        phase = rng.uniform(0.0, 2.0 * np.pi, size=2)
        a0 = modulus[0] * np.exp(1j * phase[0])
        a_lam = modulus[1] * np.exp(1j * phase[1])
        image = mono.phi_top(mono.dihedral_rep_p1(a0, a_lam, as_rat("1/5")))
        expected = mono.dihedral_rep_c(a0, a_lam, as_rat("1/5"))
        for x, y in zip(image.matrices(), expected.matrices()):
            worst = max(worst, float(np.max(np.abs(x - y))))
    return worst <= 1e-12, f"max entry gap over 20 draws {worst:.3e}"


_REGISTRY: Dict[str, List[CheckSpec]] = {
    "bundles": [
        CheckSpec("higgs-fields-respect-standard-flag",
                  "higgs-vanishing-on-flag-directions",
                  "exact-symbolic", "global", _chk_higgs_flags),
        CheckSpec("family-residues-trace-free",
                  "trace-free-normalization",
                  "exact-symbolic", "global", _chk_trace_free),
        CheckSpec("flag-eigenvalues-match-spectrum",
                  "residue-eigenvalues-on-flag-directions",
                  "exact-symbolic", "global", _chk_flag_eigenvalues),
        CheckSpec("flags-preserved-at-sampled-point",
                  "residue-eigenvalues-on-flag-directions",
                  "sampled", "triple", _chk_flags_at_point),
    ],
    "involution": [
        CheckSpec("special-polynomial-identities",
                  "deck-involution-polynomial-identities",
                  "exact-symbolic", "global", _chk_special_identities),
        CheckSpec("deck-involution-squares-to-identity",
                  "coordinate-involution-is-an-involution",
                  "exact-symbolic", "global", _chk_involution_symbolic),
        CheckSpec("involution-swaps-fiber-at-sampled-point",
                  "coordinate-involution-is-an-involution",
                  "sampled", "triple", _chk_involution_at_point),
    ],
    "tpsi": [
        CheckSpec("transport-composition-is-identity",
                  "transport-composes-to-identity",
                  "specialized", "triple", _chk_transport_composition),
        CheckSpec("derived-transport-matches-closed-form",
                  "transport-closed-form-entries",
                  "specialized", "triple", _chk_transport_derived),
        CheckSpec("derived-transport-matches-closed-form-symbolic",
                  "transport-closed-form-entries",
                  "exact-symbolic", "global", _chk_transport_derived_symbolic,
                  needs_full_symbolic=True),
    ],
    "basechange": [
        CheckSpec("gauge-linearizes-transport",
                  "gauge-halves-the-affine-transport",
                  "specialized", "triple", _chk_gauge_linearizes),
        CheckSpec("gauge-inverse-roundtrip",
                  "gauge-cocycle-invertible",
                  "specialized", "triple", _chk_gauge_roundtrip),
        CheckSpec("frame-change-roundtrip",
                  "equivariant-frame-invertible",
                  "specialized", "triple", _chk_frame_roundtrip),
        CheckSpec("gauge-determinant-identity",
                  "gauge-determinant-factorization",
                  "exact-symbolic", "global", _chk_gauge_det_identity),
        CheckSpec("equivariant-frame-regular-on-lambda-wall",
                  "equivariant-frame-extends-over-the-wall",
                  "specialized", "triple", _chk_frame_regular_on_wall),
    ],
    "symplectic": [
        CheckSpec("pullback-doubles-standard-form",
                  "coordinate-map-doubles-the-symplectic-form",
                  "specialized", "triple", _chk_symplectic_factor),
    ],
    "lagrangian": [
        CheckSpec("equivariant-section-closedness",
                  "section-derivatives-agree",
                  "exact-symbolic", "global", _chk_lagrangian_difference),
        CheckSpec("stated-sum-form-nonzero",
                  "section-derivative-sum-pinned-nonzero",
                  "exact-symbolic", "global", _chk_lagrangian_sum_pinned),
    ],
    "fixedlocus": [
        CheckSpec("fixed-rows-in-conic-ideal",
                  "fixed-locus-on-the-sigma-conic",
                  "specialized", "triple", _chk_fixed_rows),
        CheckSpec("opposite-sign-section-rejected",
                  "fixed-locus-sign-discriminates",
                  "specialized", "triple", _chk_fixed_opposite_sign),
        CheckSpec("generic-section-rejected",
                  "fixed-locus-sign-discriminates",
                  "specialized", "triple", _chk_fixed_generic),
    ],
    "localmodel": [
        CheckSpec("quotient-cone-local-model",
                  "fixed-point-local-normal-form",
                  "exact-symbolic", "global", _chk_local_model),
    ],
    "apparent": [
        CheckSpec("infinity-tangency-of-base-connection",
                  "base-connection-tangency-class",
                  "exact-symbolic", "global", _chk_app_infty_base),
        CheckSpec("tangency-pair-involution-invariant",
                  "unordered-tangency-pair-is-equivariant",
                  "sampled", "triple", _chk_app_pair_invariant),
        CheckSpec("pair-matrix-inverts-over-involution",
                  "coefficient-matrix-family-self-inverse",
                  "sampled", "triple", _chk_pair_matrix_inverts),
    ],
    "fibers": [
        CheckSpec("generic-fiber-count-is-twelve",
                  "twelve-point-generic-fiber",
                  "sampled", "triple", _chk_fiber_counts),
    ],
    "monodromy": [
        CheckSpec("descent-round-trip-on-trace-coordinates",
                  "descent-inverts-the-quotient-map",
                  "sampled", "triple", _chk_descent_round_trip),
        CheckSpec("descent-squares-to-minus-identity",
                  "descent-intertwiner-squares-to-minus-one",
                  "sampled", "triple", _chk_descent_square),
        CheckSpec("descent-preimages-non-conjugate",
                  "two-sheets-of-the-descent-cover",
                  "sampled", "triple", _chk_descent_twins),
        CheckSpec("dihedral-family-image-is-diagonal",
                  "antidiagonal-family-maps-to-diagonal-quadruple",
                  "sampled", "global", _chk_dihedral_diagonal),
    ],
}


# ----------------------------------------------------------------------
# Runner
# ----------------------------------------------------------------------

def _triples(args) -> Sequence[Tuple[str, str, str]]:
    if args.params:
        return (tuple(args.params),)
    return BUILTIN_TRIPLES


def _params_of(triple) -> Dict[str, object]:
    lam, t, nu = (as_rat(x) for x in triple)
    return {"lam": lam, "t": t, "nu": nu}


def _label_of(triple) -> str:
    lam, t, nu = (as_rat(x) for x in triple)
    return f"l={rat_str(lam)} t={rat_str(t)} nu={rat_str(nu)}"


def _tasks_for(group: str, args) -> List[Tuple[CheckSpec, RunContext]]:
    groups = GROUPS if group == "all" else (group,)
    mode_filter = MODE_FLAGS.get(args.mode) if args.mode else None
    tasks: List[Tuple[CheckSpec, RunContext]] = []
    include_slow_symbolic = args.full_symbolic or mode_filter == "exact-symbolic"
    for name in groups:
        for spec in _REGISTRY[name]:
            if spec.needs_full_symbolic and not include_slow_symbolic:
                continue
            if mode_filter and spec.mode != mode_filter:
                continue
            if spec.scope == "global":
                tasks.append((spec, RunContext(None, "-", args.seed, args.trials)))
            else:
                for index, triple in enumerate(_triples(args)):
                    ctx = RunContext(
                        _params_of(triple),
                        _label_of(triple),
                        args.seed,
                        args.trials,
                        triple_index=index,
                    )
                    tasks.append((spec, ctx))
    return tasks


def _run_one(task: Tuple[CheckSpec, RunContext]) -> CheckRecord:
    spec, ctx = task
    start = time.perf_counter()
    try:
        passed, details = spec.fn(ctx)
    except Exception as exc:  # surfaced as a failing record, not a crash
        passed, details = False, f"error: {type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    return CheckRecord(
        check_id=spec.check_id,
        ref=spec.ref,
        mode=spec.mode,
        params=ctx.label,
        passed=passed,
        seconds=elapsed,
        details=details,
    )


def _is_default_config(args) -> bool:
    return (
        args.seed == DEFAULT_SEED
        and not args.params
        and args.trials is None
        and not args.full_symbolic
        and not args.mode
    )


def cmd_verify(args) -> int:
    tasks = _tasks_for(args.group, args)
    if not tasks:
        print(f"no checks selected for group {args.group!r} "
              f"with mode {args.mode!r}", file=sys.stderr)
        return 2
    jobs = max(1, args.jobs)
    if jobs == 1:
        records = [_run_one(task) for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_one, tasks))

    report = VerificationReport(
        group=args.group,
        seed=args.seed,
        mode=args.mode or "default",
        records=records,
    )
    payload = report.to_json()

    golden_note = ""
    exit_code = report.exit_code
    if args.bless:
        if not _is_default_config(args):
            print("--bless requires the default seed, params, trials, and mode",
                  file=sys.stderr)
            return 2
        if exit_code != 0:
            print("refusing to bless a failing report", file=sys.stderr)
        else:
            GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
            path = GOLDEN_DIR / f"{args.group}.json"
            path.write_text(payload, encoding="utf-8")
            golden_note = f"golden: blessed {path.name}"
    elif _is_default_config(args):
        path = GOLDEN_DIR / f"{args.group}.json"
        if path.exists():
            if path.read_text(encoding="utf-8") == payload:
                golden_note = f"golden: match ({path.name})"
            else:
                golden_note = f"golden: MISMATCH ({path.name})"
                exit_code = max(exit_code, 1)

    if args.out:
        try:
            Path(args.out).write_text(payload, encoding="utf-8")
        except OSError as exc:
            print(f"cannot write report to {args.out}: {exc}", file=sys.stderr)
            return 3

    if args.json:
        sys.stdout.write(payload)
    else:
        for record in report.sorted_records():
            status = "pass" if record.passed else "FAIL"
            print(f"[{status}] {record.check_id} ({record.mode}, {record.params}) "
                  f"{record.seconds:.2f}s  {record.details}")
        passed = sum(1 for r in report.records if r.passed)
        print(f"group {args.group}: {passed}/{len(report.records)} passed, "
              f"exit {exit_code}")
    if golden_note:
        print(golden_note, file=sys.stderr if "MISMATCH" in golden_note else sys.stdout)
    return exit_code


# ----------------------------------------------------------------------
# Exact evaluation
# ----------------------------------------------------------------------

_NAME_ALIASES = {
    "l": "lam",
    "lam": "lam",
    "lambda": "lam",
    "t": "t",
    "nu": "nu",
    "u_l": "ul",
    "ul": "ul",
    "u_t": "ut",
    "ut": "ut",
    "c1": "c1",
    "c2": "c2",
}


@functools.lru_cache(maxsize=None)
def _known_guards() -> Tuple[Tuple[str, MPoly], ...]:
    n_infty_det = ap.coefficient_matrices().n_infty.det()
    return (
        ("u_l - l", var("ul") - var("lam")),
        ("p_pi", P_PI),
        ("p_sigma", P_SIGMA),
        ("p_lambda", P_LAMBDA),
        ("delta", DELTA),
        ("alpha", ALPHA),
        ("det-n-infinity", n_infty_det.num),
    )


@functools.lru_cache(maxsize=None)
def _eval_entries(name: str) -> Tuple[Tuple[RatFunc, ...], str]:
    """The symbolic entries of an eval object plus its display shape."""
    if name == "z":
        return (inv.z_coord(),), "scalar"
    if name == "w":
        return (inv.w_coord(),), "scalar"
    if name == "ubar":
        return (inv.ubar_t(),), "scalar"
    if name == "Tpsi":
        mat = inv.t_psi_paper()
    elif name == "B":
        mat = inv.b_matrix(None, None, check=False)
    elif name == "J":
        mat = inv.j_matrix()
    elif name == "Cinv":
        mat = inv.c_inverse()
    elif name == "M":
        mat = ap.m_matrix()
    elif name == "AppInf":
        return tuple(fam.app_infty(fam.family()).coeffs), "tuple"
    elif name == "AppPsi":
        return tuple(fam.app_psi(fam.family()).coeffs), "tuple"
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown object {name!r}")
    return tuple(mat[i, j] for i in range(3) for j in range(3)), "matrix"


def _guard_scan_entries(name: str) -> Tuple[RatFunc, ...]:
    """The rational functions whose denominators decide the guard set.

    The full coordinate map is assembled on demand from the equivariant
    frame, so its guard set is read off the frame entries together with the
    two base coordinates (every denominator of the map divides a product of
    those).
    """
    if name == "Phi":
        jinv = inv.j_inverse()
        return tuple(jinv[i, j] for i in range(3) for j in range(3)) + (
            inv.z_coord(),
            inv.w_coord(),
        )
    return _eval_entries(name)[0]


def _object_guards(name: str) -> List[Tuple[str, MPoly]]:
    entries = _guard_scan_entries(name)
    guards: List[Tuple[str, MPoly]] = []
    seen = set()
    for guard_name, poly in _known_guards():
        if guard_name in seen:
            continue
        for entry in entries:
            if poly.divides(entry.den) or (
                name == "M" and guard_name == "det-n-infinity"
            ):
                guards.append((guard_name, poly))
                seen.add(guard_name)
                break
    return guards


def _eval_values(name: str, rf_map: Dict[str, object]):
    """Evaluate one object at a (possibly partial, possibly symbolic) point."""
    if name == "Phi":
        u = (
            rf_map.get("ul", RatFunc.from_var("ul")),
            rf_map.get("ut", RatFunc.from_var("ut")),
        )
        c = (
            rf_map.get("c1", RatFunc.from_var("c1")),
            rf_map.get("c2", RatFunc.from_var("c2")),
        )
        params = {k: rf_map[k] for k in ("lam", "t", "nu") if k in rf_map}
        return list(inv.phi_full(u, c, params or None)), "tuple"
    entries, shape = _eval_entries(name)
    return [entry.subst(rf_map) if rf_map else entry for entry in entries], shape


def _parse_assignments(pairs: Sequence[str]) -> Dict[str, object]:
    rf_map: Dict[str, object] = {}
    for pair in pairs:
        if "=" not in pair:
            raise _UsageError(f"assignment {pair!r} is not of the form name=value")
        raw_name, raw_value = pair.split("=", 1)
        key = _NAME_ALIASES.get(raw_name.strip())
        if key is None:
            raise _UsageError(
                f"unknown assignment name {raw_name!r}; "
                f"expected one of {sorted(set(_NAME_ALIASES))}"
            )
        text = raw_value.strip()
        target = _NAME_ALIASES.get(text)
        if target is not None:
            rf_map[key] = RatFunc.from_var(target)
            continue
        try:
            rf_map[key] = as_rat(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise _UsageError(
                f"cannot parse value {text!r} for {raw_name!r}: {exc}"
            ) from None
    return rf_map


class _UsageError(ValueError):
    pass


def _fmt_value(rf: RatFunc) -> str:
    if not isinstance(rf, RatFunc):
        return rat_str(rf)
    if rf.den == MPoly.const(1):
        return rf.num.to_str()
    return f"({rf.num.to_str()})/({rf.den.to_str()})"


def cmd_eval(args) -> int:
    try:
        rf_map = _parse_assignments(args.at or [])
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2

    # Genericity pre-check with named guards.
    for guard_name, poly in _object_guards(args.object):
        image = as_ratfunc(poly).subst(rf_map) if rf_map else as_ratfunc(poly)
        if image.is_zero():
            if args.object == "ubar" and guard_name == "p_pi":
                # The involution sends these points to u_t = infinity.
                print("infinity")
                return 0
            message = {
                "error": "non-generic point",
                "guard": guard_name,
                "object": args.object,
            }
            if args.json:
                print(json.dumps(message, indent=2, sort_keys=True))
            else:
                print(
                    f"non-generic point: guard '{guard_name}' vanishes "
                    f"at the given assignment",
                    file=sys.stderr,
                )
            return 1

    try:
        values, shape = _eval_values(args.object, rf_map)
    except ZeroDivisionError:
        print(
            "non-generic point: a denominator vanishes at the given assignment",
            file=sys.stderr,
        )
        return 1

    formatted = [_fmt_value(v) for v in values]
    if shape == "matrix":
        structure: object = [formatted[i * 3:(i + 1) * 3] for i in range(3)]
    elif shape == "tuple":
        structure = formatted
    else:
        structure = formatted[0]

    if args.json:
        payload = {
            "object": args.object,
            "assignment": {k: _fmt_value(as_ratfunc(v)) for k, v in sorted(rf_map.items())},
            "value": structure,
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif shape == "scalar":
        print(structure)
    else:
        print(json.dumps(structure, indent=2))
    return 0


# ----------------------------------------------------------------------
# Report rendering
# ----------------------------------------------------------------------

def cmd_report(args) -> int:
    source = Path(args.source)
    try:
        text = source.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cannot read report from {source}: {exc}", file=sys.stderr)
        return 2
    try:
        report = VerificationReport.from_json(text)
    except (ValueError, KeyError) as exc:
        print(f"malformed report in {source}: {exc}", file=sys.stderr)
        return 2

    rendered = report.to_json() if args.format == "json" else report.to_markdown()
    target = Path(args.path)
    try:
        target.write_text(rendered, encoding="utf-8")
    except OSError as exc:
        print(f"cannot write report to {target}: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {args.format} report to {target}")
    return 0


# ----------------------------------------------------------------------
# Argument parsing
# ----------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parconn",
        description="Exact verification harness for the package identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run an identity suite")
    verify.add_argument("group", choices=GROUPS + ("all",))
    verify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    verify.add_argument("--trials", type=int, default=None)
    verify.add_argument(
        "--params",
        nargs=3,
        metavar=("L", "T", "NU"),
        help="replace the built-in triples by one rational triple",
    )
    verify.add_argument("--mode", choices=sorted(MODE_FLAGS), default=None)
    verify.add_argument("--full-symbolic", action="store_true")
    verify.add_argument("--json", action="store_true")
    verify.add_argument("--jobs", type=int, default=1)
    verify.add_argument("--bless", action="store_true",
                        help="regenerate the golden report for this group")
    verify.add_argument("--out", default=None,
                        help="also write the canonical JSON report to this path")
    verify.set_defaults(fn=cmd_verify)

    evaluate = sub.add_parser("eval", help="evaluate a closed-form object")
    evaluate.add_argument("object", choices=EVAL_OBJECTS)
    evaluate.add_argument("--at", nargs="+", metavar="NAME=VALUE", default=[])
    evaluate.add_argument("--json", action="store_true")
    evaluate.set_defaults(fn=cmd_eval)

    render = sub.add_parser("report", help="re-render a saved report")
    render.add_argument("--format", choices=("json", "markdown"), required=True)
    render.add_argument("--path", required=True)
    render.add_argument("--from", dest="source", required=True,
                        help="a JSON report written by 'verify --out'")
    render.set_defaults(fn=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "params", None):
        try:
            for value in args.params:
                as_rat(value)
        except (ValueError, ZeroDivisionError) as exc:
            print(f"usage error: bad --params value: {exc}", file=sys.stderr)
            return 2
    try:
        return args.fn(args)
    except NonGenericError as exc:
        print(f"non-generic point: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - last-resort guard
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
