"""Command line front end.

    chevelem rootsys --system G2
    chevelem ring --ring Z/4
    chevelem commutator --system B2 --output b2.csv
    chevelem egroup --system A2 --ring Z/2
    chevelem verify --lemma perfect --system B2 --ring Z/2
    chevelem suite --profile quick --output quick.json
"""

import argparse
import json
import os
import sys
import tempfile

from . import engine as eng
from .chevalley import build_chevalley, derive_commutator_table, root_element
from .errors import CapExceeded, ChevelemError, DescriptorError, DomainError
from .lemmas import LEMMA_IDS, Caps, Workspace, run_lemma
from .rings import all_ideals, idempotents, make_ring
from .rootsystem import _jsonable, build_root_system, root_hyperplanes, verify_hyperplane_lemma
from .suite import EXIT_CAP, EXIT_OK, EXIT_USAGE, PROFILES, exit_code, outcome, run_suite


def write_atomic(path, text):
    """Write through a temporary file in the target directory, then rename."""
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def emit(args, obj, text=None):
    text = dumps(obj) if text is None else text
    if getattr(args, "output", None):
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text)


def caps_of(args):
    return Caps(element_cap=args.cap, depth_cap=args.depth_cap, workers=args.workers)


# ---------------------------------------------------------------------------
# commands


def cmd_rootsys(args):
    phi = build_root_system(args.system)
    rep = verify_hyperplane_lemma(phi)
    out = phi.to_dict()
    out["positive_roots"] = list(phi.positive_roots)
    out["simple_roots"] = list(phi.simple_roots)
    out["hyperplanes"] = [list(n) for n in root_hyperplanes(phi)]
    out["hyperplane_lemma"] = rep.to_dict()
    emit(args, out)
    return EXIT_OK if rep.ok else 1


def cmd_ring(args):
    R = make_ring(args.ring)
    out = R.to_dict()
    out["units"] = [R.label(u) for u in R.units]
    out["idempotents"] = [R.label(e) for e in idempotents(R)]
    out["ideals"] = [sorted(R.label(a) for a in I.elements) for I in all_ideals(R)]
    emit(args, out)
    return EXIT_OK


def cmd_commutator(args):
    C = build_chevalley(build_root_system(args.system))
    table = derive_commutator_table(C)
    emit(args, None, table.to_csv())
    return EXIT_OK


def cmd_egroup(args):
    phi = build_root_system(args.system)
    R = make_ring(args.ring)
    C = build_chevalley(phi)
    G = eng.elementary_group(C, R, cap=args.cap, full=args.full_generators, workers=args.workers)
    out = {"system": phi.label, "ring": R.descriptor, **G.to_dict()}
    if args.full_generators:
        # depth over all root elements is the word width in root elements
        out["width"] = G.diameter if G.complete else None
    if args.width_of:
        alpha, x = args.width_of.split(":")
        g = root_element(C, R, tuple(int(v) for v in alpha.split(",")), R.elem(x))
        out["target_width"] = G.depth_of(g)
    if args.dump:
        write_atomic(args.dump, dumps(G.dump()))
    emit(args, out)
    return EXIT_OK if G.complete else EXIT_CAP


def cmd_verify(args):
    lemmas = args.lemma
    if "all" in lemmas:
        lemmas = list(LEMMA_IDS)
    bad = [lem for lem in lemmas if lem not in LEMMA_IDS]
    if bad:
        raise DescriptorError(f"unknown lemma id(s): {', '.join(bad)}")
    ws = Workspace(args.system, args.ring, caps_of(args))
    reports = []
    for lem in lemmas:
        reports += run_lemma(lem, ws, ideal_text=args.ideal, parts_text=args.parts,
                             timings=args.timings)
    # expected failures are reported but still make verify exit 1
    code = exit_code(r.status for r in reports)
    out = {"reports": [dict(r.to_dict(), expected_failure=outcome(r) == "xfail") for r in reports],
           "exit_code": code}
    emit(args, out)
    return code


def cmd_suite(args):
    def progress(rep, res):
        if args.verbose:
            inst = "/".join(str(v) for v in rep.instance.values() if v)
            print(f"{res:13s} {rep.lemma_id:17s} {inst}", file=sys.stderr, flush=True)

    prof = PROFILES[args.profile]
    caps = None
    if args.cap or args.depth_cap or args.workers > 1:
        caps = Caps(element_cap=args.cap or prof.cap, depth_cap=args.depth_cap, workers=args.workers)
    result = run_suite(prof, caps=caps, timings=args.timings, progress=progress)
    emit(args, result.to_dict())
    return result.exit_code


# ---------------------------------------------------------------------------
# parser


def build_parser():
    p = argparse.ArgumentParser(prog="chevelem", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, cap=eng.DEFAULT_CAP):
        sp.add_argument("--output", "-o", help="write the report here (atomically)")
        sp.add_argument("--cap", type=int, default=cap, help="element cap for closures")
        sp.add_argument("--depth-cap", type=int, default=None)
        sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("rootsys", help="root system data and the hyperplane lemma")
    sp.add_argument("--system", required=True)
    sp.add_argument("--output", "-o")
    sp.set_defaults(fn=cmd_rootsys)

    sp = sub.add_parser("ring", help="finite ring data: units, idempotents, ideals")
    sp.add_argument("--ring", required=True)
    sp.add_argument("--output", "-o")
    sp.set_defaults(fn=cmd_ring)

    sp = sub.add_parser("commutator", help="commutator table as CSV")
    sp.add_argument("--system", required=True)
    sp.add_argument("--output", "-o")
    sp.set_defaults(fn=cmd_commutator)

    sp = sub.add_parser("egroup", help="elementary group order, diameter and widths")
    sp.add_argument("--system", required=True)
    sp.add_argument("--ring", required=True)
    sp.add_argument("--full-generators", action="store_true",
                    help="use every t_alpha(x) as a generator (depth = root-element width)")
    sp.add_argument("--width-of", metavar="ALPHA:X", help="width of t_alpha(x), alpha as 1,-1,0")
    sp.add_argument("--dump", help="write the sorted element list here")
    common(sp)
    sp.set_defaults(fn=cmd_egroup)

    sp = sub.add_parser("verify", help="run lemma verifications on one instance")
    sp.add_argument("--lemma", action="append", required=True,
                    help="lemma id (repeatable) or 'all'")
    sp.add_argument("--system")
    sp.add_argument("--ring")
    sp.add_argument("--ideal", help="ideal generators separated by ';', or R")
    sp.add_argument("--parts", help="xmod-dec parts, comma separated ideals")
    sp.add_argument("--timings", action="store_true")
    common(sp)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("suite", help="run a verification profile")
    sp.add_argument("--profile", choices=sorted(PROFILES), default="quick")
    sp.add_argument("--timings", action="store_true")
    sp.add_argument("--verbose", "-v", action="store_true")
    common(sp, cap=None)
    sp.set_defaults(fn=cmd_suite)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (DescriptorError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ChevelemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
