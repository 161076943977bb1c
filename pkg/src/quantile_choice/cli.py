"""Command-line interface.

Every command prints one JSON report.  Exit status is 0 on success, 1 when a
check or audit finds a violation, 2 on bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import string
import sys
from fractions import Fraction
from typing import Any, Optional, Sequence

from . import fixtures, io, one_sided, two_sided, voting
from .audit import Deviation, DomainTooLarge, Verdict
from .core import Lottery, Preference, compare_lotteries, representative, rep_rank, sd_compare, sd_equivalence_audit
from .feasibility import MatchingLottery
from .sampling import random_lottery, random_preference

DEFAULT_MAX_DOMAIN = 200_000

VOTING_RULES = ("r-plurality", "top2-half", "uniform", "dictator")
ONE_SIDED_MECHANISMS = ("sd", "psd", "top-choice")
TWO_SIDED_MECHANISMS = ("half-da", "efficient-stable", "topchoice-bmatching")
CHECKS = ("efficiency", "stability", "proportionality", "envy-freeness", "distinct-representatives", "dr-efficiency")

ENVY_READING = "agent i judges row j with her own preference and quantile"
IMPROVEMENT_READING = "Pareto steps are rank-decrement feasibility queries iterated to a fixed point"


class UsageError(Exception):
    pass


def _q(v) -> str:
    return io.format_rational(v)


def _digest(payload: Any) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _rational(text: str) -> Fraction:
    try:
        return io.parse_rational(text, "argument")
    except io.InstanceError as e:
        raise UsageError(str(e)) from None


# ---- documents and names -------------------------------------------------


def _letters(k: int) -> tuple[str, ...]:
    if k <= 26:
        return tuple(string.ascii_lowercase[:k])
    return tuple(f"o{i + 1}" for i in range(k))


def default_document(instance) -> io.Document:
    if isinstance(instance, two_sided.TwoSidedInstance):
        n = instance.n
        return io.Document(io.TWO_SIDED, instance, tuple(f"m{i + 1}" for i in range(n)), tuple(f"w{j + 1}" for j in range(n)))
    agents = tuple(str(i + 1) for i in range(instance.n))
    if isinstance(instance, voting.VotingInstance):
        return io.Document(io.VOTING, instance, agents, _letters(instance.m))
    return io.Document(io.ONE_SIDED, instance, agents, _letters(instance.n))


def _override_h(doc: io.Document, h: Optional[str]) -> io.Document:
    if h is None:
        return doc
    q = _rational(h)
    if not 0 <= q <= 1:
        raise UsageError(f"--h-override {q} outside [0, 1]")
    inst = doc.instance
    if doc.kind == io.TWO_SIDED:
        inst = inst.with_h(q)
    elif doc.kind == io.VOTING:
        inst = voting.VotingInstance(inst.prefs, (q,) * inst.n)
    else:
        inst = one_sided.OneSidedInstance(inst.prefs, (q,) * inst.n)
    return io.Document(doc.kind, inst, doc.agents, doc.options)


def _load(args) -> io.Document:
    if getattr(args, "fixture", None):
        if args.fixture not in fixtures.FIXTURES:
            raise UsageError(f"unknown fixture {args.fixture!r}; see 'fixtures list'")
        doc = fixtures.FIXTURES[args.fixture]()
    elif getattr(args, "input", None):
        doc = io.parse_instance(args.input)
    else:
        raise UsageError("an instance is required (--input or --fixture)")
    return _override_h(doc, getattr(args, "h_override", None))


def _expect(doc: io.Document, kind: str, what: str) -> None:
    if doc.kind != kind:
        raise UsageError(f"{what} needs a {kind} instance, got {doc.kind}")


def _pref_names(p: Preference, labels: Sequence[str]) -> list[str]:
    return [labels[o] for o in p.order]


# ---- serialisation of results ---------------------------------------------


def _lottery_json(x) -> Any:
    if isinstance(x, MatchingLottery):
        return [[_q(v) for v in row] for row in x.rows()]
    return [_q(v) for v in x]


def _parse_lottery(data: Any, path: str = "lottery"):
    if isinstance(data, dict) and "lottery" in data:
        data = data["lottery"]
        path = "lottery"
    if not isinstance(data, list) or not data:
        raise io.InstanceError(path, "expected a non-empty list")
    try:
        if all(isinstance(r, list) for r in data):
            return MatchingLottery([[io.parse_rational(v, f"{path}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(data)])
        return Lottery(tuple(io.parse_rational(v, f"{path}[{k}]") for k, v in enumerate(data)))
    except io.InstanceError:
        raise
    except ValueError as e:
        raise io.InstanceError(path, str(e)) from None


def _representatives(doc: io.Document, x) -> list[dict]:
    inst = doc.instance
    if doc.kind == io.TWO_SIDED:
        out = []
        for i in range(inst.n):
            g = representative(x.row(i), inst.n_prefs[i], inst.n_h[i])
            out.append({"agent": doc.agents[i], "representative": doc.options[g], "rank": inst.n_prefs[i].rank(g)})
        for j in range(inst.n):
            i = representative(x.col(j), inst.m_prefs[j], inst.m_h[j])
            out.append({"agent": doc.options[j], "representative": doc.agents[i], "rank": inst.m_prefs[j].rank(i)})
        return out
    out = []
    for i in range(inst.n):
        row = x if doc.kind == io.VOTING else x.row(i)
        g = representative(row, inst.prefs[i], inst.h[i])
        out.append({"agent": doc.agents[i], "representative": doc.options[g], "rank": inst.prefs[i].rank(g)})
    return out


def _verdict_json(v: Verdict, doc: io.Document, name: str) -> dict:
    detail = v.detail
    if isinstance(detail, (Lottery, MatchingLottery)):
        detail = {"dominating_lottery": _lottery_json(detail)}
    elif name == "envy-freeness" and detail is not None:
        i, j = detail
        detail = {"envious": doc.agents[i], "envied": doc.agents[j], "reading": ENVY_READING}
    elif name == "stability" and detail is not None:
        i, j = detail
        detail = {"blocking_pair": [doc.agents[i], doc.options[j]]}
    elif name == "proportionality":
        detail = {"violators": [doc.agents[i] for i in detail]} if detail else None
    elif name == "dr-efficiency" and detail is not None:
        sigma, tau, y = detail
        detail = {
            "n_representatives": [doc.options[g] for g in sigma],
            "m_representatives": [doc.agents[i] for i in tau],
            "dominating_lottery": _lottery_json(y),
        }
    out = {"holds": v.ok}
    if detail is not None:
        out["detail"] = detail
    return out


def run_check(name: str, doc: io.Document, x) -> Verdict:
    inst = doc.instance
    if doc.kind == io.VOTING:
        table = {"efficiency": lambda: voting.is_efficient_lottery(x, inst)}
    elif doc.kind == io.ONE_SIDED:
        table = {
            "efficiency": lambda: one_sided.efficiency_check_one_sided(x, inst),
            "proportionality": lambda: one_sided.proportionality_check(x, inst),
            "envy-freeness": lambda: one_sided.envy_free_check(x, inst),
        }
    else:
        table = {
            "efficiency": lambda: two_sided.efficiency_check_two_sided(x, inst),
            "stability": lambda: two_sided.stability_check(x, inst),
            "distinct-representatives": lambda: Verdict(two_sided.distinct_representatives(x, inst)),
            "dr-efficiency": lambda: two_sided.dr_efficiency_check(x, inst),
        }
    if name not in table:
        raise UsageError(f"check {name!r} does not apply to {doc.kind} instances")
    return table[name]()


def applicable_checks(doc: io.Document) -> list[str]:
    if doc.kind == io.VOTING:
        return ["efficiency"]
    if doc.kind == io.ONE_SIDED:
        return ["efficiency", "proportionality", "envy-freeness"]
    checks = ["stability", "efficiency", "distinct-representatives"]
    if doc.instance.n <= two_sided.DR_MAX_N:
        checks.append("dr-efficiency")
    return checks


def _deviation_json(dev: Deviation, doc: io.Document) -> dict:
    inst = doc.instance
    if doc.kind == io.TWO_SIDED:
        n = inst.n
        labels = [doc.options] * n + [doc.agents] * n
        names = list(doc.agents) + list(doc.options)
    else:
        labels = [doc.options] * len(dev.profile)
        names = list(doc.agents)
    return {
        "profile": [_pref_names(p, labels[k]) for k, p in enumerate(dev.profile)],
        "agent": names[dev.agent],
        "report": _pref_names(dev.report, labels[dev.agent]),
        "truthful_rank": dev.truthful_rank,
        "deviating_rank": dev.deviating_rank,
    }


# ---- mechanisms -----------------------------------------------------------


def _dictator_index(doc: io.Document, name: Optional[str]) -> int:
    if name is None:
        return 0
    if name not in doc.agents:
        raise UsageError(f"unknown dictator {name!r}")
    return doc.agents.index(name)


def _order(doc: io.Document, order: Optional[str]) -> Optional[list[int]]:
    if order is None:
        return None
    names = [s.strip() for s in order.split(",")]
    if sorted(names) != sorted(doc.agents):
        raise UsageError(f"--order must list every agent once: {list(doc.agents)}")
    return [doc.agents.index(s) for s in names]


def voting_rule(name: str, doc: Optional[io.Document] = None, dictator: Optional[str] = None):
    if name == "r-plurality":
        return voting.r_plurality
    if name == "top2-half":
        return voting.top2_half_rule
    if name == "uniform":
        return voting.uniform_rule
    if name == "dictator":
        return voting.dictatorship_rule(_dictator_index(doc, dictator) if doc else 0)
    raise UsageError(f"unknown voting rule {name!r}")


def one_sided_mechanism(name: str, order: Optional[list[int]] = None):
    if name == "sd":
        return lambda inst: one_sided.sd_mechanism(inst, order)
    if name == "psd":
        return lambda inst: one_sided.psd_mechanism(inst, order)
    if name == "top-choice":
        return lambda inst: one_sided.top_choice_welfare(inst)[0]
    raise UsageError(f"unknown one-sided mechanism {name!r}")


def two_sided_mechanism(name: str):
    if name == "half-da":
        return two_sided.half_da
    if name == "efficient-stable":
        return two_sided.efficient_stable
    if name == "topchoice-bmatching":
        return lambda inst: two_sided.topchoice_bmatching(inst)[0]
    raise UsageError(f"unknown two-sided mechanism {name!r}")


def _base_report(command: str, doc: io.Document, **extra) -> dict:
    report = {"command": command, "input_digest": _digest(io.to_dict(doc))}
    report.update(extra)
    return report


def _finish_mechanism(report: dict, doc: io.Document, x, log: Sequence[str] = ()) -> dict:
    report["lottery"] = _lottery_json(x)
    report["representatives"] = _representatives(doc, x)
    report["checks"] = {c: _verdict_json(run_check(c, doc, x), doc, c) for c in applicable_checks(doc)}
    report["log"] = list(log)
    return report


def cmd_vote(args) -> tuple[dict, int]:
    doc = _load(args)
    _expect(doc, io.VOTING, "vote")
    rule = voting_rule(args.rule, doc, args.dictator)
    x = rule(doc.instance.prefs, doc.instance.h)
    report = _base_report("vote", doc, mechanism=args.rule, options=list(doc.options))
    return _finish_mechanism(report, doc, x), 0


def cmd_one_sided(args) -> tuple[dict, int]:
    doc = _load(args)
    _expect(doc, io.ONE_SIDED, "one-sided")
    order = _order(doc, args.order)
    inst = doc.instance
    report = _base_report("one-sided", doc, mechanism=args.mechanism)
    if args.mechanism == "top-choice":
        outcome, count = one_sided.top_choice_welfare(inst)
        report["top_choice_count"] = count
    else:
        outcome = one_sided_mechanism(args.mechanism, order)(inst)
        report["order"] = [doc.agents[i] for i in (order or range(inst.n))]
    report["items"] = list(doc.options)
    report["notes"] = {"envy_freeness_reading": ENVY_READING}
    return _finish_mechanism(report, doc, outcome.lottery, outcome.log), 0


def cmd_two_sided(args) -> tuple[dict, int]:
    doc = _load(args)
    _expect(doc, io.TWO_SIDED, "two-sided")
    inst = doc.instance
    report = _base_report("two-sided", doc, mechanism=args.mechanism)
    log: list[str] = []
    if args.mechanism == "topchoice-bmatching":
        try:
            res = two_sided.topchoice_bmatching_detail(inst)
        except ValueError as e:
            raise UsageError(str(e)) from None
        x = res.lottery
        report["top_choice_count"] = res.count
        report["b"] = res.b
        report["selected_edges"] = [[doc.agents[i], doc.options[j]] for i, j in sorted(res.edges)]
        report["selected_mass_exact"] = res.exact
    elif args.mechanism == "efficient-stable":
        steps = two_sided.efficient_stable_steps(inst)
        x = steps[-1]
        log = [f"step {k}: total rank {sum(sum(r) for r in two_sided.representative_ranks(s, inst))}" for k, s in enumerate(steps)]
        report["notes"] = {"improvement_reading": IMPROVEMENT_READING}
    else:
        x = two_sided_mechanism(args.mechanism)(inst)
    report["rows"] = list(doc.agents)
    report["columns"] = list(doc.options)
    return _finish_mechanism(report, doc, x, log), 0


def cmd_check(args) -> tuple[dict, int]:
    doc = _load(args)
    with open(args.lottery) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise io.InstanceError("lottery", f"invalid JSON: {e}") from None
    x = _parse_lottery(data)
    if doc.kind == io.VOTING:
        if not isinstance(x, Lottery) or len(x) != doc.instance.m:
            raise io.InstanceError("lottery", f"expected {doc.instance.m} probabilities")
    elif not isinstance(x, MatchingLottery) or x.n != doc.instance.n:
        raise io.InstanceError("lottery", f"expected a {doc.instance.n}x{doc.instance.n} matrix")
    names = applicable_checks(doc) if args.property == "all" else [args.property]
    verdicts = {c: run_check(c, doc, x) for c in names}
    report = _base_report("check", doc, lottery=_lottery_json(x))
    report["representatives"] = _representatives(doc, x)
    report["checks"] = {c: _verdict_json(v, doc, c) for c, v in verdicts.items()}
    return report, 0 if all(verdicts.values()) else 1


# ---- audits ---------------------------------------------------------------


def _domain_spec(args, kind: str):
    """Quantiles for an exhaustive audit from --n, --m and --h."""
    if args.n is None or args.h is None:
        raise UsageError("exhaustive audits need --n and --h (or --input / --fixture)")
    hs = [_rational(s) for s in args.h.split(",")]
    width = args.n * (2 if kind == io.TWO_SIDED else 1)
    if len(hs) == 1:
        hs *= width
    if len(hs) != width:
        raise UsageError(f"--h needs 1 or {width} values")
    if any(not 0 <= q <= 1 for q in hs):
        raise UsageError("quantiles must lie in [0, 1]")
    return hs


def _mechanism_kind(name: str) -> str:
    if name in VOTING_RULES:
        return io.VOTING
    if name in ONE_SIDED_MECHANISMS:
        return io.ONE_SIDED
    if name in TWO_SIDED_MECHANISMS:
        return io.TWO_SIDED
    raise UsageError(f"unknown mechanism {name!r}")


def _audit_sp(args) -> tuple[dict, int]:
    kind = _mechanism_kind(args.mechanism)
    if args.input or args.fixture:
        doc = _load(args)
        _expect(doc, kind, f"mechanism {args.mechanism}")
        inst = doc.instance
        profiles = [inst.profile if kind == io.TWO_SIDED else inst.prefs]
        scope = "unilateral misreports from the given profile"
    else:
        hs = _domain_spec(args, kind)
        n = args.n
        if kind == io.VOTING:
            m = args.m or 3
            inst = voting.VotingInstance(tuple(Preference(tuple(range(m))) for _ in range(n)), hs)
        elif kind == io.ONE_SIDED:
            inst = one_sided.OneSidedInstance(tuple(Preference(tuple(range(n))) for _ in range(n)), hs)
        else:
            ident = tuple(Preference(tuple(range(n))) for _ in range(n))
            inst = two_sided.TwoSidedInstance(ident, ident, hs[:n], hs[n:])
        doc = default_document(inst)
        profiles = None
        scope = "every profile of the domain"
    guard = args.max_domain
    if kind == io.VOTING:
        rule = voting_rule(args.mechanism, doc, args.dictator)
        res = voting.strategyproofness_audit(rule, inst.n, inst.m, inst.h, profiles, guard)
    elif kind == io.ONE_SIDED:
        res = one_sided.one_sided_sp_audit(one_sided_mechanism(args.mechanism, _order(doc, args.order)), inst.h, profiles, guard)
    else:
        res = two_sided.two_sided_sp_audit(two_sided_mechanism(args.mechanism), inst.n_h, inst.m_h, profiles, guard)
    report = _base_report("audit", doc, suite="sp", mechanism=args.mechanism, scope=scope)
    report["profiles_checked"] = res.profiles_checked
    report["deviations_checked"] = res.cases_checked
    report["counterexample"] = None if res.passed else _deviation_json(res.counterexample, doc)
    return report, 0 if res.passed else 1


def _audit_voting(args, suite: str) -> tuple[dict, int]:
    if _mechanism_kind(args.mechanism) != io.VOTING:
        raise UsageError(f"the {suite} audit applies to voting rules")
    if args.input or args.fixture:
        doc = _load(args)
        _expect(doc, io.VOTING, f"the {suite} audit")
        n, h, m = doc.instance.n, doc.instance.h, doc.instance.m
        profiles = [doc.instance.prefs] if suite == "efficiency" else None
    else:
        h = _domain_spec(args, io.VOTING)
        n, m, profiles = args.n, (2 if suite == "monotonicity" else args.m or 3), None
        doc = default_document(voting.VotingInstance(tuple(Preference(tuple(range(m))) for _ in range(n)), h))
    rule = voting_rule(args.mechanism, doc, args.dictator)
    report = _base_report("audit", doc, suite=suite, mechanism=args.mechanism)
    if suite == "monotonicity":
        if m != 2:
            raise UsageError("monotonicity is audited on two alternatives")
        v = voting.is_monotone(rule, n, h)
        report["counterexample"] = None if v is None else {
            "profile": [_pref_names(p, doc.options) for p in v.profile],
            "agent": doc.agents[v.agent],
            "before": _q(v.before),
            "after": _q(v.after),
            "destabilising_quantile": _q(voting.destabilising_quantile(v)),
        }
        return report, 0 if v is None else 1
    res = voting.efficiency_audit(rule, n, m, h, profiles, args.max_domain)
    report["profiles_checked"] = res.profiles_checked
    c = res.counterexample
    report["counterexample"] = None if c is None else {
        "profile": [_pref_names(p, doc.options) for p in c.profile],
        "lottery": _lottery_json(c.lottery),
        "dominating_lottery": _lottery_json(c.dominating),
    }
    return report, 0 if res.passed else 1


def _audit_sd_equivalence(args) -> tuple[dict, int]:
    rng = random.Random(args.seed)
    failures = []
    for t in range(args.trials):
        m = rng.randint(1, args.max_m)
        x, y = random_lottery(rng, m), random_lottery(rng, m)
        pref = random_preference(rng, m)
        if not sd_equivalence_audit(x, y, pref):
            failures.append({"trial": t, "x": _lottery_json(x), "y": _lottery_json(y), "order": list(pref.order)})
    report = {
        "command": "audit",
        "suite": "sd-equivalence",
        "input_digest": _digest({"seed": args.seed, "trials": args.trials, "max_m": args.max_m}),
        "seed": args.seed,
        "trials": args.trials,
        "passed": args.trials - len(failures),
        "failures": failures[:10],
    }
    return report, 0 if not failures else 1


def cmd_audit(args) -> tuple[dict, int]:
    if args.suite == "sd-equivalence":
        return _audit_sd_equivalence(args)
    if args.mechanism is None:
        raise UsageError(f"audit {args.suite} needs --mechanism")
    if args.suite == "sp":
        return _audit_sp(args)
    return _audit_voting(args, args.suite)


# ---- small commands -------------------------------------------------------


def _named_lottery(spec: Sequence[str], labels: Sequence[str], flag: str) -> Lottery:
    probs = {}
    for item in spec:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"{flag} entries look like name=probability, got {item!r}")
        if name not in labels:
            raise UsageError(f"{flag}: unknown option {name!r}")
        probs[name] = _rational(value)
    try:
        return Lottery(tuple(probs.get(o, Fraction(0)) for o in labels))
    except ValueError as e:
        raise UsageError(f"{flag}: {e}") from None


def _pref_arg(names: Sequence[str]) -> tuple[Preference, tuple[str, ...]]:
    if len(set(names)) != len(names):
        raise UsageError("--pref repeats an option")
    labels = tuple(sorted(names))
    return Preference(tuple(labels.index(o) for o in names)), labels


def cmd_rep(args) -> tuple[dict, int]:
    pref, labels = _pref_arg(args.pref)
    x = _named_lottery(args.lottery, labels, "--lottery")
    h = _rational(args.h)
    if not 0 <= h <= 1:
        raise UsageError("--h must lie in [0, 1]")
    o = representative(x, pref, h)
    payload = {"pref": args.pref, "lottery": _lottery_json(x), "h": _q(h)}
    return {"command": "rep", "input_digest": _digest(payload), "representative": labels[o], "rank": pref.rank(o)}, 0


def cmd_compare(args) -> tuple[dict, int]:
    pref, labels = _pref_arg(args.pref)
    x = _named_lottery(args.x, labels, "--x")
    y = _named_lottery(args.y, labels, "--y")
    report = {"command": args.command}
    payload = {"pref": args.pref, "x": _lottery_json(x), "y": _lottery_json(y)}
    if args.command == "compare":
        h = _rational(args.h)
        if not 0 <= h <= 1:
            raise UsageError("--h must lie in [0, 1]")
        payload["h"] = _q(h)
        report["input_digest"] = _digest(payload)
        report["result"] = compare_lotteries(x, y, pref, h).value
        report["representatives"] = {"x": labels[representative(x, pref, h)], "y": labels[representative(y, pref, h)]}
    else:
        report["input_digest"] = _digest(payload)
        report["result"] = sd_compare(x, y, pref).value
    return report, 0


def cmd_fixtures(args) -> tuple[Any, int]:
    if args.action == "list":
        return {"fixtures": [{"name": k, "kind": f().kind} for k, f in fixtures.FIXTURES.items()]}, 0
    if args.name not in fixtures.FIXTURES:
        raise UsageError(f"unknown fixture {args.name!r}")
    return io.to_dict(fixtures.FIXTURES[args.name]()), 0


# ---- argument parsing -----------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quantile-choice", description="Randomised social choice under quantile utilities.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, instance=True):
        sp.add_argument("--output", help="write the report here instead of stdout")
        if instance:
            sp.add_argument("--input", help="instance document (JSON)")
            sp.add_argument("--fixture", help="use a named fixture as the instance")
            sp.add_argument("--h-override", help="replace every quantile with this value")

    sp = sub.add_parser("rep", help="representative of a lottery")
    sp.add_argument("--pref", nargs="+", required=True, help="options, most preferred first")
    sp.add_argument("--lottery", nargs="+", required=True, help="entries name=probability")
    sp.add_argument("--h", required=True)
    common(sp, instance=False)
    sp.set_defaults(func=cmd_rep)

    for name in ("compare", "sd-compare"):
        sp = sub.add_parser(name, help="compare two lotteries" + (" by stochastic dominance" if name == "sd-compare" else ""))
        sp.add_argument("--pref", nargs="+", required=True)
        sp.add_argument("--x", nargs="+", required=True)
        sp.add_argument("--y", nargs="+", required=True)
        if name == "compare":
            sp.add_argument("--h", required=True)
        common(sp, instance=False)
        sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("vote", help="run a voting rule")
    sp.add_argument("rule", choices=VOTING_RULES)
    sp.add_argument("--dictator", help="agent name for the dictator rule (default: first agent)")
    common(sp)
    sp.set_defaults(func=cmd_vote)

    sp = sub.add_parser("one-sided", help="run a one-sided matching mechanism")
    sp.add_argument("mechanism", choices=ONE_SIDED_MECHANISMS)
    sp.add_argument("--order", help="comma-separated agent names for serial dictatorship")
    common(sp)
    sp.set_defaults(func=cmd_one_sided)

    sp = sub.add_parser("two-sided", help="run a two-sided matching mechanism")
    sp.add_argument("mechanism", choices=TWO_SIDED_MECHANISMS)
    common(sp)
    sp.set_defaults(func=cmd_two_sided)

    sp = sub.add_parser("check", help="check properties of a given lottery")
    sp.add_argument("property", choices=CHECKS + ("all",))
    sp.add_argument("--lottery", required=True, help="JSON list (voting) or matrix of rational strings")
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("audit", help="exhaustive or sampled audits")
    sp.add_argument("suite", choices=("sp", "efficiency", "monotonicity", "sd-equivalence"))
    sp.add_argument("--mechanism", choices=VOTING_RULES + ONE_SIDED_MECHANISMS + TWO_SIDED_MECHANISMS)
    sp.add_argument("--n", type=int, help="agents per side")
    sp.add_argument("--m", type=int, help="alternatives (voting)")
    sp.add_argument("--h", help="one quantile for all agents, or a comma-separated list")
    sp.add_argument("--dictator")
    sp.add_argument("--order")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--max-m", type=int, default=6)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-domain", type=int, default=DEFAULT_MAX_DOMAIN, help="largest exhaustive profile count")
    common(sp)
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("fixtures", help="list or emit named instances")
    sp.add_argument("action", choices=("list", "emit"))
    sp.add_argument("name", nargs="?")
    common(sp, instance=False)
    sp.set_defaults(func=cmd_fixtures)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = args.func(args)
    except (UsageError, io.InstanceError, DomainTooLarge, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
