"""Command-line front end: subcommand dispatch and report emission.

Subcommands:

    farey-dist P/Q R/S          exact Farey-graph distance, printed bare
    arc-dist ARC ARC            arc-complex distance on a surface
    bundle-report WORD          geometrize one bundle, JSON report
    verify-thm14 --max-word-len K   corpus scan of the area/height bounds, CSV
    verify-lifting --cover F --pairs F   lifted-arc distance comparison, JSON
    lemma-suite                 seeded Monte-Carlo checks of the two lemmas

Exit codes: 0 when everything checked passes, 1 when a verification
emits a violation, 2 on usage or input errors, 3 when the numerics give
up (non-convergence or an unstable development).

Reports carry ``schema`` 1, the package and numeric-library versions,
and the full run configuration including the random seed.  JSON objects
are emitted with sorted keys; equal configurations produce byte-equal
reports regardless of the worker count.

The verify-thm14 CSV starts with ``#``-prefixed provenance lines and a
fixed header::

    word,area,longitude,height,d1,...,dN,stable_upper,margins,flags

with one ``dn`` column per checked power, margins as
``name=value`` pairs joined by ``;``, and flags joined by ``;``.  The
pairs file for verify-lifting is a JSON list of two-element lists of arc
literals (``"arc w0,..;c0,.."`` or ``"slope p/q"``) read on the base
surface of the cover.  Corpus verification fans out over worker threads;
CUSPLAB_THREADS overrides the count.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict

import numpy as np
import scipy

from . import __version__, arcs, bounds, bundle, farey, geometry, surface
from .errors import CuspLabError, NumericalError

__all__ = ["RunConfig", "corpus", "run", "main"]

SCHEMA = 1

# acceptance tolerances of the lemma checks, not user-settable
TANGENT_TOL = 1e-9
CONE_TOL = 1e-12

_SWAP = str.maketrans("RL", "LR")


@dataclass(frozen=True)
class RunConfig:
    """Everything a run depends on besides the input files.

    One frozen record per invocation; the caps are validated here once so
    the handlers can trust them, and the record is embedded verbatim in
    every emitted report.
    """

    subcommand: str
    tol: float = 1e-12
    depth: int = 8
    budget: int = 64
    cap: int = 12
    n_max: int = 4
    max_word_len: int = 6
    stable_n: int = 20
    samples: int = 100000
    cone_samples: int = 10000
    seed: int = 0
    init: str = "i"
    out: str = None
    fmt: str = "json"

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ValueError("--tol must be positive")
        for name in ("depth", "budget", "cap", "n_max", "max_word_len",
                     "stable_n", "samples", "cone_samples"):
            if int(getattr(self, name)) < 1:
                raise ValueError("%s must be positive" % name)

    def to_json(self):
        return asdict(self)


def _versions():
    return {"cusplab": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__}


def _envelope(config):
    return {"schema": SCHEMA,
            "versions": _versions(),
            "config": config.to_json()}


def _json_text(doc):
    return json.dumps(doc, sort_keys=True, separators=(", ", ": ")) + "\n"


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _note(msg):
    print("cusplab: %s" % msg, file=sys.stderr)


# ---- corpus ----

def _canonical(word):
    """Largest rotation of the word or its letter swap, R sorting high."""
    best = None
    for w in (word, word.translate(_SWAP)):
        for i in range(len(w)):
            rot = w[i:] + w[:i]
            if best is None or rot > best:
                best = rot
    return best


def corpus(max_len):
    """All monodromy words up to max_len, one per symmetry class.

    Words in R and L containing both letters, deduplicated up to cyclic
    rotation and the R/L swap; rotation is conjugation of the monodromy
    and the swap inverts it up to conjugacy, so each class is one
    homeomorphism type.  Pure powers of one letter are parabolic, not
    pseudo-Anosov, and are excluded by construction.  Sorted by length
    then lexicographically; this is the canonical report order.
    """
    if max_len < 2:
        raise ValueError("corpus needs max_len >= 2")
    seen = set()
    for n in range(2, max_len + 1):
        # bit patterns 1 .. 2^n - 2 always contain both letters
        for bits in range(1, 2 ** n - 1):
            word = "".join("R" if (bits >> (n - 1 - i)) & 1 else "L"
                           for i in range(n))
            seen.add(_canonical(word))
    return sorted(seen, key=lambda w: (len(w), w))


def _worker_count():
    env = os.environ.get("CUSPLAB_THREADS")
    if env is not None:
        try:
            n = int(env)
        except ValueError:
            raise ValueError("CUSPLAB_THREADS must be an integer, got %r"
                             % env)
        if n < 1:
            raise ValueError("CUSPLAB_THREADS must be positive, got %r" % env)
        return n
    return min(8, os.cpu_count() or 1)


# ---- subcommand handlers ----

def _cmd_farey_dist(args):
    s = farey.Slope.parse(args.slope_a)
    t = farey.Slope.parse(args.slope_b)
    print(farey.distance(s, t))
    return 0


def _read_text(path):
    with open(path) as fh:
        return fh.read()


def _cmd_arc_dist(args, config):
    if args.surface:
        base = surface.IdealTriangulation.from_text(_read_text(args.surface))
    else:
        base = surface.once_punctured_torus()
    a = arcs.parse_arc(base, args.arc_a)
    b = arcs.parse_arc(base, args.arc_b)
    print(arcs.distance(a, b, budget=config.budget))
    return 0


def _cmd_bundle_report(args, config):
    report = bundle.bundle_report(args.word, tol=config.tol,
                                  depth=config.depth, init=config.init)
    doc = _envelope(config)
    doc.update(report)
    _emit(_json_text(doc), config.out)
    return 0


def _thm14_csv(config, reports):
    buf = io.StringIO()
    buf.write("# cusplab verify-thm14 schema %d\n" % SCHEMA)
    buf.write("# versions: %s" % _json_text(_versions()))
    buf.write("# config: %s" % _json_text(config.to_json()))
    writer = csv.writer(buf, lineterminator="\n")
    header = ["word", "area", "longitude", "height"]
    header += ["d%d" % n for n in range(1, config.n_max + 1)]
    header += ["stable_upper", "margins", "flags"]
    writer.writerow(header)
    for rep in reports:
        margins = ";".join("%s=%r" % (k, rep.margins[k])
                           for k in sorted(rep.margins))
        row = [rep.word, repr(rep.cusp_area), repr(rep.longitude),
               repr(rep.height)]
        row += [str(rep.d_psi_n[n]) for n in range(1, config.n_max + 1)]
        row += [repr(rep.stable_upper), margins, ";".join(rep.flags)]
        writer.writerow(row)
    return buf.getvalue()


def _cmd_verify_thm14(config):
    words = corpus(config.max_word_len)

    def measure(word):
        return bounds.verify_fibered(word, n_max=config.n_max,
                                     tol=config.tol, depth=config.depth,
                                     stable_n=config.stable_n)

    workers = _worker_count()
    if workers > 1 and len(words) > 1:
        # map preserves submission order, so the merge is canonical
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(measure, words))
    else:
        reports = [measure(w) for w in words]

    _emit(_thm14_csv(config, reports), config.out)
    bad = [rep.word for rep in reports if rep.violations]
    if bad:
        _note("violations on %s" % ", ".join(bad))
        return 1
    _note("%d words, all bounds hold" % len(reports))
    return 0


def _load_pairs(base, path):
    doc = json.loads(_read_text(path))
    if not isinstance(doc, list):
        raise ValueError("--pairs file must hold a JSON list of pairs")
    pairs = []
    for i, entry in enumerate(doc):
        if not (isinstance(entry, list) and len(entry) == 2
                and all(isinstance(x, str) for x in entry)):
            raise ValueError("--pairs entry %d is not a pair of arc literals"
                             % i)
        pairs.append((arcs.parse_arc(base, entry[0]),
                      arcs.parse_arc(base, entry[1])))
    return pairs


def _cmd_verify_lifting(args, config):
    cover = surface.cover_from_text(_read_text(args.cover))
    pairs = _load_pairs(cover.base, args.pairs)
    report = bounds.verify_lifting(cover, pairs, cap=config.cap)
    ok = report["all_upper_hold"] and report["all_lower_hold"]
    doc = _envelope(config)
    doc["report"] = report
    doc["status"] = "PASS" if ok else "VIOLATION"
    _emit(_json_text(doc), config.out)
    return 0 if ok else 1


# ---- lemma suite ----

def _random_disjoint_pair(rng):
    # occasionally put one ball at infinity; redraw until disjoint
    while True:
        if rng.integers(6) == 0:
            h1 = geometry.Horoball(math.inf, float(rng.uniform(0.1, 5.0)))
        else:
            c1 = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
            h1 = geometry.Horoball(c1, float(rng.uniform(0.05, 3.0)))
        c2 = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        h2 = geometry.Horoball(c2, float(rng.uniform(0.05, 3.0)))
        if h1.at_infinity or abs(h1.center - h2.center) > 1e-12:
            if geometry.horoball_distance(h1, h2) >= 0.0:
                return h1, h2


def _tangent_check(config, rng):
    """Tangent-segment extremes over random disjoint pairs.

    The segment between touch points is shortest, and the horocyclic run
    longest, exactly at tangency; random pairs must stay on the right
    side of both constants and constructed tangent pairs must attain
    them.
    """
    sqrt2 = math.sqrt(2.0)
    worst_l1 = math.inf
    worst_l2 = 0.0
    violations = 0
    for _ in range(config.samples):
        l1, l2 = geometry.tangent_lengths(*_random_disjoint_pair(rng))
        worst_l1 = min(worst_l1, l1)
        worst_l2 = max(worst_l2, l2)
        if l1 < geometry.TANGENT_MIN - TANGENT_TOL:
            violations += 1
        if l2 > sqrt2 + TANGENT_TOL:
            violations += 1

    # tangency: |u - v|^2 = d1 d2, plus the half-plane normal form
    equality_error = 0.0
    tangent_cases = [(geometry.Horoball(math.inf, 1.0),
                      geometry.Horoball(0j, 1.0))]
    for _ in range(50):
        d1 = float(rng.uniform(0.05, 3.0))
        d2 = float(rng.uniform(0.05, 3.0))
        shift = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        # nudged apart so rounding cannot produce a tiny overlap
        gap = math.sqrt(d1 * d2) * (1.0 + 1e-12)
        tangent_cases.append((geometry.Horoball(shift, d1),
                              geometry.Horoball(shift + gap, d2)))
    for h1, h2 in tangent_cases:
        l1, l2 = geometry.tangent_lengths(h1, h2)
        equality_error = max(equality_error,
                             abs(l1 - geometry.TANGENT_MIN),
                             abs(l2 - sqrt2))
    if equality_error > TANGENT_TOL:
        violations += 1

    return {"name": "tangent-bounds",
            "samples": config.samples,
            "tolerance": TANGENT_TOL,
            "min_l1": worst_l1,
            "min_l1_bound": geometry.TANGENT_MIN,
            "max_l2": worst_l2,
            "max_l2_bound": sqrt2,
            "equality_error": equality_error,
            "violations": violations,
            "status": "PASS" if violations == 0 else "VIOLATION"}


def _cone_check(config, rng):
    """Exponential growth of expanded cusp areas on cone surfaces."""
    violations = 0
    worst = math.inf
    for _ in range(config.cone_samples):
        params = geometry.ConeCuspParams(
            base_area=float(rng.uniform(0.1, 5.0)),
            cone_excess=float(rng.uniform(0.0, 2.0 * math.pi)),
            x_v=float(rng.uniform(0.0, 3.0)))
        x = float(rng.uniform(0.0, 4.0))
        d = float(rng.uniform(0.0, 3.0))
        small = geometry.cone_cusp_area(params, x)
        grown = geometry.cone_cusp_area(params, x + d)
        margin = grown - math.exp(d) * small
        worst = min(worst, margin / grown)
        if margin < -CONE_TOL * grown:
            violations += 1
    return {"name": "cone-growth",
            "samples": config.cone_samples,
            "tolerance": CONE_TOL,
            "worst_relative_margin": worst,
            "violations": violations,
            "status": "PASS" if violations == 0 else "VIOLATION"}


def _cmd_lemma_suite(config):
    rng = np.random.default_rng(config.seed)
    checks = [_tangent_check(config, rng), _cone_check(config, rng)]
    ok = all(c["status"] == "PASS" for c in checks)
    doc = _envelope(config)
    doc["checks"] = checks
    doc["status"] = "PASS" if ok else "VIOLATION"
    _emit(_json_text(doc), config.out)
    return 0 if ok else 1


# ---- dispatch ----

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cusplab",
        description="Arc-complex distances and cusp geometry of "
                    "punctured-torus bundles.")
    sub = parser.add_subparsers(dest="subcommand", metavar="subcommand")

    p = sub.add_parser("farey-dist",
                       help="exact Farey-graph distance between two slopes")
    p.add_argument("slope_a", metavar="P/Q")
    p.add_argument("slope_b", metavar="R/S")

    p = sub.add_parser("arc-dist",
                       help="arc-complex distance between two arc literals")
    p.add_argument("arc_a", metavar="ARC")
    p.add_argument("arc_b", metavar="ARC")
    p.add_argument("--budget", type=int, default=64,
                   help="normal-coordinate search cap (default 64)")
    p.add_argument("--surface", metavar="FILE",
                   help="triangulation file (default: once-punctured torus)")

    p = sub.add_parser("bundle-report",
                       help="solve one bundle and report its maximal cusp")
    p.add_argument("word", metavar="WORD")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--init", choices=["regular", "i"], default="i")
    p.add_argument("--out", metavar="FILE")

    p = sub.add_parser("verify-thm14",
                       help="scan the word corpus against the cusp bounds")
    p.add_argument("--max-word-len", type=int, required=True, metavar="K")
    p.add_argument("--n-max", type=int, default=4, metavar="N")
    p.add_argument("--stable-n", type=int, default=20, metavar="N")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--out", metavar="FILE")

    p = sub.add_parser("verify-lifting",
                       help="compare arc distances with their lifts")
    p.add_argument("--cover", required=True, metavar="FILE")
    p.add_argument("--pairs", required=True, metavar="FILE")
    p.add_argument("--cap", type=int, default=12)
    p.add_argument("--out", metavar="FILE")

    p = sub.add_parser("lemma-suite",
                       help="seeded Monte-Carlo checks of the lemma bounds")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--cone-samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="FILE")

    return parser


def _dispatch(args):
    name = args.subcommand
    if name == "farey-dist":
        return _cmd_farey_dist(args)
    if name == "arc-dist":
        if args.budget < 1:
            raise ValueError("--budget must be positive")
        config = RunConfig(name, budget=args.budget, fmt="text")
        return _cmd_arc_dist(args, config)
    if name == "bundle-report":
        config = RunConfig(name, tol=args.tol, depth=args.depth,
                           init=args.init, out=args.out)
        return _cmd_bundle_report(args, config)
    if name == "verify-thm14":
        if args.max_word_len < 2:
            raise ValueError("--max-word-len must be at least 2")
        if args.n_max < 1:
            raise ValueError("--n-max must be positive")
        config = RunConfig(name, tol=args.tol, depth=args.depth,
                           n_max=args.n_max, max_word_len=args.max_word_len,
                           stable_n=args.stable_n, out=args.out, fmt="csv")
        return _cmd_verify_thm14(config)
    if name == "verify-lifting":
        if args.cap < 1:
            raise ValueError("--cap must be positive")
        config = RunConfig(name, cap=args.cap, out=args.out)
        return _cmd_verify_lifting(args, config)
    if name == "lemma-suite":
        config = RunConfig(name, samples=args.samples,
                           cone_samples=args.cone_samples, seed=args.seed,
                           out=args.out)
        return _cmd_lemma_suite(config)
    raise ValueError("unknown subcommand %r" % name)


def run(argv):
    """Parse argv (no program name) and run; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        # argparse already printed its message; 2 on usage, 0 on --help
        return int(exc.code or 0)
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        _note("a subcommand is required")
        return 2
    try:
        return _dispatch(args)
    except NumericalError as exc:
        _note("numerical failure: %s" % exc)
        return 3
    except (CuspLabError, OSError, ValueError) as exc:
        _note("error: %s" % exc)
        return 2


def main():
    sys.exit(run(sys.argv[1:]))
