"""Verification profiles: which lemma runs on which instance, and the
aggregate pass/fail matrix."""

from dataclasses import dataclass, field

from .lemmas import (EXPECTED_FAILURES, GROUP_LEMMAS, LEMMA_IDS, RING_LEMMAS, SYSTEM_LEMMAS, Caps,
                     Workspace, is_expected_failure, run_lemma)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


@dataclass
class Profile:
    name: str
    systems: tuple = ()
    rings: tuple = ()
    grid: tuple = ()            # (system, ring) pairs for the group lemmas
    shards: tuple = ()          # (system, ring, lemma ids, cap) restricted runs
    cap: int = 100_000

    def jobs(self):
        """Ordered (system, ring, lemma, cap) jobs."""
        out = []
        for s in self.systems:
            out += [(s, None, lem, self.cap) for lem in LEMMA_IDS if lem in SYSTEM_LEMMAS]
        for r in self.rings:
            out += [(None, r, lem, self.cap) for lem in LEMMA_IDS if lem in RING_LEMMAS]
        for s, r in self.grid:
            out += [(s, r, lem, self.cap) for lem in LEMMA_IDS if lem in GROUP_LEMMAS]
        for s, r, lems, cap in self.shards:
            out += [(s, r, lem, cap) for lem in lems]
        return out


_QUICK_SYSTEMS = ("A2", "B2")
_QUICK_RINGS = ("Z/2", "Z/3", "Z/4")

PROFILES = {
    "empty": Profile("empty"),
    "quick": Profile(
        "quick", _QUICK_SYSTEMS, _QUICK_RINGS,
        tuple((s, r) for s in _QUICK_SYSTEMS for r in _QUICK_RINGS)),
    "full": Profile(
        "full",
        _QUICK_SYSTEMS + ("G2", "A3", "B3", "C3", "D4"),
        _QUICK_RINGS + ("F4", "Z/6", "Z/8", "Z/2 x Z/2", "Z/2[x]/(x^2)"),
        tuple((s, r) for s in _QUICK_SYSTEMS for r in _QUICK_RINGS)
        + (("A2", "F4"), ("A2", "Z/6"), ("G2", "Z/2"), ("A3", "Z/2")),
        # certificate modes only: E(D4, Z/2) itself is far beyond enumeration
        (("D4", "Z/2", ("homogeneity", "elim-abs", "root-gen", "perfect", "normalization"),
          200_000),),
        cap=1_200_000),
}


def outcome(report):
    if report.status == "fail" and is_expected_failure(report):
        return "xfail"
    return report.status


def instance_key(inst):
    parts = [inst.get("system"), inst.get("ring")]
    key = "/".join(p for p in parts if p)
    if inst.get("ideal"):
        key += f" [{inst['ideal']}]"
    return key


def exit_code(outcomes):
    outcomes = list(outcomes)
    if "fail" in outcomes:
        return EXIT_FAIL
    if "cap-exceeded" in outcomes:
        return EXIT_CAP
    return EXIT_OK


@dataclass
class SuiteResult:
    profile: str
    entries: list = field(default_factory=list)

    @property
    def exit_code(self):
        return exit_code(e["outcome"] for e in self.entries)

    def to_dict(self):
        matrix, summary = {}, {}
        for e in self.entries:
            r = e["report"]
            matrix.setdefault(r["lemma_id"], {})[instance_key(r["instance"])] = e["outcome"]
            summary[e["outcome"]] = summary.get(e["outcome"], 0) + 1
        return {"profile": self.profile,
                "expected_failures": [list(x) for x in EXPECTED_FAILURES],
                "summary": summary, "matrix": matrix,
                "reports": [dict(e["report"], outcome=e["outcome"]) for e in self.entries],
                "exit_code": self.exit_code}


def run_suite(profile, caps=None, timings=False, progress=None):
    """Run every job of a profile, sharing one workspace per (system, ring).

    ``caps`` overrides the profile's element caps."""
    prof = PROFILES[profile] if isinstance(profile, str) else profile
    spaces = {}
    result = SuiteResult(prof.name)
    for s, r, lem, cap in prof.jobs():
        if caps is None:
            caps_here = Caps(element_cap=cap)
        else:
            caps_here = caps
        ws = spaces.get((s, r, caps_here.element_cap))
        if ws is None:
            # keep one group workspace alive at a time; they hold the big sets
            if s and r:
                for k in [k for k in spaces if k[0] and k[1]]:
                    del spaces[k]
            ws = spaces[(s, r, caps_here.element_cap)] = Workspace(s, r, caps_here)
        for rep in run_lemma(lem, ws, timings=timings):
            result.entries.append({"report": rep.to_dict(), "outcome": outcome(rep)})
            if progress:
                progress(rep, outcome(rep))
    return result
